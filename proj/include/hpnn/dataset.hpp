// dataset.hpp -- labeled, subject-tagged sample records and the
// subject-independent fold protocol.
//
// Index CSV contract: first line `#classes:name0,name1,...`; every
// following row `path,subject_id,label_name`. UTF-8, comma-separated, no
// quoting (paths must not contain commas). Relative paths are resolved
// against the index file's directory.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hpnn {

struct SampleRecord {
    std::string image_path;
    std::string subject_id;
    int label = 0;
    std::string label_name;
};

struct DatasetIndex {
    std::vector<std::string> class_names;
    std::vector<SampleRecord> records;

    int n_classes() const { return static_cast<int>(class_names.size()); }
};

DatasetIndex load_index(const std::string& path);
DatasetIndex parse_index(std::istream& in, const std::string& base_dir);
void write_index(const DatasetIndex& index, std::ostream& out);

// Subject-independent fold assignment: distinct subject ids are sorted
// ascending (numerically when every id is an unsigned integer, otherwise
// lexicographically) and the subject at sorted position p goes to fold
// p mod n_folds. In each cross-validation trial, fold t is the test fold,
// fold (t+1) mod n_folds the validation fold, and the rest train.
struct FoldPlan {
    int n_folds = 10;
    std::map<std::string, int> assignment; // subject_id -> fold

    int fold_of(const std::string& subject_id) const;
    std::vector<int> training_folds(int trial) const;
    int validation_fold(int trial) const { return (trial + 1) % n_folds; }
};

FoldPlan subject_folds(const DatasetIndex& index, int n_folds = 10);

void write_fold_plan(const FoldPlan& plan, std::ostream& out);
FoldPlan load_fold_plan(const std::string& path);

// Half-data experiment: deterministically keeps 4 of the 8 training folds
// (seeded Fisher-Yates selection, result sorted). Throws WrongFoldCount
// unless exactly 8 folds are passed.
std::vector<int> reduce_training_folds(const std::vector<int>& train_folds,
                                       std::uint64_t seed);

} // namespace hpnn

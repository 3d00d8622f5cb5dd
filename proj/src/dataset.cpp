#include "hpnn/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hpnn/error.hpp"
#include "hpnn/rng.hpp"

namespace hpnn {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        fields.emplace_back();
    }
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return c >= '0' && c <= '9';
    });
}

// Ascending, numeric-aware: when every id is an unsigned integer the
// comparison is by value (leading-zero ties broken lexicographically),
// otherwise plain lexicographic.
void sort_subjects(std::vector<std::string>& ids) {
    const bool numeric = std::all_of(ids.begin(), ids.end(), all_digits);
    if (numeric) {
        // Zero-padding to equal length makes lexicographic order equal
        // numeric order; literal comparison breaks leading-zero ties.
        std::sort(ids.begin(), ids.end(),
                  [](const std::string& a, const std::string& b) {
                      const std::size_t n = std::max(a.size(), b.size());
                      const std::string pa = std::string(n - a.size(), '0') + a;
                      const std::string pb = std::string(n - b.size(), '0') + b;
                      if (pa != pb) return pa < pb;
                      return a < b;
                  });
    } else {
        std::sort(ids.begin(), ids.end());
    }
}

} // namespace

DatasetIndex parse_index(std::istream& in, const std::string& base_dir) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("index is empty");
    }
    line = strip_cr(line);
    const std::string prefix = "#classes:";
    if (line.rfind(prefix, 0) != 0) {
        throw ParseError("index must start with '#classes:name0,name1,...'");
    }
    DatasetIndex index;
    index.class_names = split(line.substr(prefix.size()), ',');
    if (index.class_names.empty() ||
        std::any_of(index.class_names.begin(), index.class_names.end(),
                    [](const std::string& s) { return s.empty(); })) {
        throw ParseError("class list is empty or has empty names");
    }
    {
        std::set<std::string> seen(index.class_names.begin(),
                                   index.class_names.end());
        if (seen.size() != index.class_names.size()) {
            throw ParseError("duplicate class names in index header");
        }
    }

    std::set<std::string> seen_paths;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
            fields[2].empty()) {
            throw ParseError("index line " + std::to_string(line_no) +
                             ": expected 'path,subject_id,label_name', got '" +
                             line + "'");
        }
        SampleRecord record;
        record.image_path = fields[0];
        if (!base_dir.empty() &&
            !std::filesystem::path(record.image_path).is_absolute()) {
            record.image_path =
                (std::filesystem::path(base_dir) / record.image_path).string();
        }
        record.subject_id = fields[1];
        record.label_name = fields[2];
        const auto it = std::find(index.class_names.begin(),
                                  index.class_names.end(), record.label_name);
        if (it == index.class_names.end()) {
            throw UnknownLabel("index line " + std::to_string(line_no) +
                               ": label '" + record.label_name +
                               "' is not in the class list");
        }
        record.label = static_cast<int>(it - index.class_names.begin());
        if (!seen_paths.insert(fields[0]).second) {
            throw DuplicatePath("index line " + std::to_string(line_no) +
                                ": duplicate path '" + fields[0] + "'");
        }
        index.records.push_back(std::move(record));
    }
    return index;
}

DatasetIndex load_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open index: " + path);
    }
    return parse_index(in, std::filesystem::path(path).parent_path().string());
}

void write_index(const DatasetIndex& index, std::ostream& out) {
    out << "#classes:";
    for (std::size_t i = 0; i < index.class_names.size(); ++i) {
        if (i) out << ',';
        out << index.class_names[i];
    }
    out << '\n';
    for (const SampleRecord& r : index.records) {
        out << r.image_path << ',' << r.subject_id << ',' << r.label_name << '\n';
    }
}

int FoldPlan::fold_of(const std::string& subject_id) const {
    const auto it = assignment.find(subject_id);
    if (it == assignment.end()) {
        throw Error("subject '" + subject_id + "' is not in the fold plan");
    }
    return it->second;
}

std::vector<int> FoldPlan::training_folds(int trial) const {
    std::vector<int> folds;
    const int val = validation_fold(trial);
    for (int f = 0; f < n_folds; ++f) {
        if (f != trial && f != val) folds.push_back(f);
    }
    return folds;
}

FoldPlan subject_folds(const DatasetIndex& index, int n_folds) {
    std::set<std::string> distinct;
    for (const SampleRecord& r : index.records) {
        distinct.insert(r.subject_id);
    }
    if (static_cast<int>(distinct.size()) < n_folds) {
        throw TooFewSubjects("need at least " + std::to_string(n_folds) +
                             " distinct subjects, found " +
                             std::to_string(distinct.size()));
    }
    std::vector<std::string> ids(distinct.begin(), distinct.end());
    sort_subjects(ids);

    FoldPlan plan;
    plan.n_folds = n_folds;
    for (std::size_t p = 0; p < ids.size(); ++p) {
        plan.assignment[ids[p]] = static_cast<int>(p % n_folds);
    }
    return plan;
}

void write_fold_plan(const FoldPlan& plan, std::ostream& out) {
    out << "subject_id,fold\n";
    for (const auto& [subject, fold] : plan.assignment) {
        out << subject << ',' << fold << '\n';
    }
}

FoldPlan load_fold_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open fold plan: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "subject_id,fold") {
        throw ParseError("fold plan must start with 'subject_id,fold'");
    }
    FoldPlan plan;
    int max_fold = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 2 || fields[0].empty() || !all_digits(fields[1])) {
            throw ParseError("fold plan line " + std::to_string(line_no) +
                             ": expected 'subject_id,fold'");
        }
        const int fold = std::stoi(fields[1]);
        plan.assignment[fields[0]] = fold;
        max_fold = std::max(max_fold, fold);
    }
    if (plan.assignment.empty()) {
        throw ParseError("fold plan has no assignments");
    }
    plan.n_folds = std::max(10, max_fold + 1);
    return plan;
}

std::vector<int> reduce_training_folds(const std::vector<int>& train_folds,
                                       std::uint64_t seed) {
    if (train_folds.size() != 8) {
        throw WrongFoldCount("expected exactly 8 training folds, got " +
                             std::to_string(train_folds.size()));
    }
    std::vector<int> pool = train_folds;
    SplitMix64 rng(seed);
    rng.shuffle(pool);
    pool.resize(4);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace hpnn

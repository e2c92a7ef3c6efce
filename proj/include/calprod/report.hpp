#pragma once

// JSON-lines report records and CSV summaries for batch runs.

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace calprod {

/// One record per assertion; machine-parseable.
struct ReportRecord {
    std::string experiment;
    long long instance = 0;
    std::string metric;
    double value = 0.0;
    bool pass = true;
    std::string provenance;  // parameter echo
};

class Reporter {
public:
    explicit Reporter(std::ostream* jsonl = nullptr) : jsonl_(jsonl) {}

    void add(const ReportRecord& rec) {
        records_.push_back(rec);
        if (!rec.pass) ++failures_;
        if (jsonl_) {
            nlohmann::json j{{"experiment", rec.experiment}, {"instance", rec.instance},
                             {"metric", rec.metric},         {"value", rec.value},
                             {"pass", rec.pass},             {"provenance", rec.provenance}};
            (*jsonl_) << j.dump() << '\n';
        }
    }

    void add(const std::string& experiment, long long instance, const std::string& metric, double value,
             bool pass, const std::string& provenance = "") {
        add(ReportRecord{experiment, instance, metric, value, pass, provenance});
    }

    long long failures() const { return failures_; }
    bool all_passed() const { return failures_ == 0; }
    const std::vector<ReportRecord>& records() const { return records_; }

    /// Aggregated per (experiment, metric): count, passes, min, max.
    void write_csv_summary(std::ostream& os) const {
        struct Agg {
            long long count = 0, passes = 0;
            double min = 0.0, max = 0.0;
        };
        std::map<std::pair<std::string, std::string>, Agg> table;
        for (const ReportRecord& r : records_) {
            Agg& a = table[{r.experiment, r.metric}];
            if (a.count == 0) {
                a.min = a.max = r.value;
            } else {
                a.min = std::min(a.min, r.value);
                a.max = std::max(a.max, r.value);
            }
            ++a.count;
            if (r.pass) ++a.passes;
        }
        os << "experiment,metric,count,passes,min,max\n";
        os.precision(17);
        for (const auto& [key, a] : table)
            os << key.first << ',' << key.second << ',' << a.count << ',' << a.passes << ',' << a.min << ','
               << a.max << '\n';
    }

private:
    std::ostream* jsonl_;
    std::vector<ReportRecord> records_;
    long long failures_ = 0;
};

}  // namespace calprod

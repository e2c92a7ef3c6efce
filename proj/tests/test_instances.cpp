#include <doctest.h>

#include <cmath>

#include "calprod/instances.hpp"
#include "calprod/report.hpp"

#include <sstream>

using namespace calprod;

TEST_CASE("instance generation is deterministic per (seed, index)") {
    Window win(1, 4, 1);
    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    Sequence a = generate_instance(1, 0, shape);
    Sequence b = generate_instance(1, 0, shape);
    CHECK(a.entries == b.entries);
    Sequence c = generate_instance(1, 1, shape);
    CHECK(a.entries != c.entries);
    Sequence d = generate_instance(2, 0, shape);
    CHECK(a.entries != d.entries);

    CHECK(generate_instances(5, 0, shape).empty());
}

TEST_CASE("dense shapes cover every in-window index in range") {
    Window win(1, 3, 2);
    InstanceShape shape{win, 0, 3, 1.0, -1, false, true};
    Sequence seq = generate_instance(9, 0, shape);
    long long expected = 0;
    for (int j = 0; j <= 3; ++j) expected += win.cell_count(j);
    CHECK(static_cast<long long>(seq.support_size()) == expected);
}

TEST_CASE("magnitudes are log-uniform within [2^-8, 2^8]") {
    Window win(1, 3, 1);
    InstanceShape shape{win, 0, -1, 1.0, -1, false, true};
    for (std::uint64_t i = 0; i < 5; ++i) {
        Sequence seq = generate_instance(13, i, shape);
        for (const auto& [idx, v] : seq.entries) {
            (void)idx;
            CHECK(std::abs(v) >= std::exp2(-8.0));
            CHECK(std::abs(v) <= std::exp2(8.0));
        }
    }
}

TEST_CASE("capped-support shapes draw exactly the requested count") {
    Window win(1, 4, 1);
    InstanceShape shape{win, 0, -1, 1.0, 6, false, true};
    for (std::uint64_t i = 0; i < 10; ++i) CHECK(generate_instance(17, i, shape).support_size() == 6);
}

TEST_CASE("reporter aggregates records into a CSV summary") {
    std::ostringstream jsonl;
    Reporter rep(&jsonl);
    rep.add("exp", 0, "metric_a", 1.0, true, "p=2");
    rep.add("exp", 1, "metric_a", 3.0, false, "p=2");
    rep.add("exp", 0, "metric_b", -1.0, true, "");
    CHECK(rep.failures() == 1);
    CHECK_FALSE(rep.all_passed());

    // one JSON object per line
    std::istringstream lines(jsonl.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j.contains("experiment"));
        CHECK(j.contains("pass"));
        ++count;
    }
    CHECK(count == 3);

    std::ostringstream csv;
    rep.write_csv_summary(csv);
    const std::string text = csv.str();
    CHECK(text.find("experiment,metric,count,passes,min,max") != std::string::npos);
    CHECK(text.find("exp,metric_a,2,1,1,3") != std::string::npos);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support.hpp"
#include "vrin/baselines.hpp"
#include "vrin/objectives.hpp"

using namespace vrin;

namespace {

// O(n^2) Mann-Whitney: fraction of positive/negative pairs ranked
// correctly, ties counting one half.
double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != 0) continue;
            pairs += 1.0;
            wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return wins / pairs;
}

// Step-wise AP: for each distinct threshold (descending), precision at that
// threshold times the recall gained.
double threshold_ap(const std::vector<double>& s, const std::vector<int>& y) {
    std::vector<double> thresholds(s);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
    double ap = 0.0, prev_recall = 0.0;
    for (double th : thresholds) {
        double tp = 0.0, pp = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] >= th) {
                pp += 1.0;
                tp += y[i];
            }
        }
        const double recall = tp / positives;
        ap += (recall - prev_recall) * (tp / pp);
        prev_recall = recall;
    }
    return ap;
}

}  // namespace

TEST_CASE("AUC agrees with the pairwise oracle, ties included") {
    std::mt19937_64 rng(17);
    for (int c = 0; c < 200; ++c) {
        const std::size_t n = 2 + rng() % 60;
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 10) / 10.0;  // coarse grid forces ties
            y[i] = static_cast<int>(rng() % 2);
        }
        y[0] = 0;
        y[1] = 1;
        CHECK(std::abs(roc_auc(s, y) - pairwise_auc(s, y)) < 1e-12);
        CHECK(std::abs(average_precision(s, y) - threshold_ap(s, y)) < 1e-12);
    }
}

TEST_CASE("classification metric spot values") {
    CHECK(roc_auc(std::vector<double>{0.1, 0.9}, std::vector<int>{0, 1}) == 1.0);
    CHECK(roc_auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, std::vector<int>{0, 1, 0, 1}) == 0.5);
    CHECK(average_precision(std::vector<double>{0.2, 0.7}, std::vector<int>{1, 1}) == 1.0);
    CHECK_THROWS(roc_auc(std::vector<double>{0.2, 0.7}, std::vector<int>{1, 1}));
}

TEST_CASE("imputation metrics follow their formulas") {
    auto m = imputation_metrics(std::vector<double>{2, 2}, std::vector<double>{1, 3});
    CHECK(m.mae == 1.0);
    CHECK(m.mre == 0.5);
    CHECK(m.mse == 1.0);
    m = imputation_metrics(std::vector<double>{4}, std::vector<double>{6});
    CHECK(m.mae == 2.0);
    CHECK(m.mre == 0.5);
    CHECK(m.mse == 4.0);
    m = imputation_metrics(std::vector<double>{1, -3}, std::vector<double>{1, -3});
    CHECK(m.mae == 0.0);
    CHECK(m.mre == 0.0);
    CHECK(m.mse == 0.0);
    CHECK_THROWS(imputation_metrics(std::vector<double>{}, std::vector<double>{}));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 5.0);
    for (int c = 0; c < 20; ++c) {
        std::vector<double> t(50), e(50);
        for (auto& v : t) v = normal(rng);
        for (auto& v : e) v = normal(rng);
        double abs_err = 0, abs_truth = 0, sq = 0;
        for (std::size_t i = 0; i < 50; ++i) {
            abs_err += std::abs(t[i] - e[i]);
            abs_truth += std::abs(t[i]);
            sq += (t[i] - e[i]) * (t[i] - e[i]);
        }
        const auto got = imputation_metrics(t, e);
        CHECK(std::abs(got.mae - abs_err / 50) < 1e-12);
        CHECK(std::abs(got.mre - abs_err / abs_truth) < 1e-12);
        CHECK(std::abs(got.mse - sq / 50) < 1e-12);
    }
}

TEST_CASE("record-based metrics are invariant to entry order") {
    RemovalRecord r{{{0, 0, 0, 1.0}, {0, 1, 1, -2.0}, {1, 2, 0, 5.0}}};
    auto est = [](const RemovedEntry& e) { return e.value + static_cast<double>(e.step) - 0.5; };
    const auto a = imputation_metrics(r, est);
    std::reverse(r.entries.begin(), r.entries.end());
    const auto b = imputation_metrics(r, est);
    CHECK(a.mae == doctest::Approx(b.mae).epsilon(1e-15));
    CHECK(a.mse == doctest::Approx(b.mse).epsilon(1e-15));
}

TEST_CASE("summaries format as mean plus-minus sample std") {
    CHECK(format_summary(summarize(std::vector<double>{0.8347, 0.8347, 0.8347})) == "0.8347 ± 0.0000");
    const auto s = summarize(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(s.mean == 2.0);
    CHECK(s.stddev == 1.0);
    CHECK(format_summary(s) == "2.0000 ± 1.0000");
}

TEST_CASE("baseline fills") {
    MaskedBatch b(1, 4, 2);
    b.timestamps = {0, 1, 2, 3};
    b.mask = {1, 0, 0, 0, 0, 1, 0, 0};
    b.values = {5, 0, 0, 0, 0, 4, 0, 0};
    const NormStats stats{{3.0, 1.0}, {1.0, 1.0}};
    CHECK(fill(b, FillMethod::Zero, stats) == b.values);
    const auto mean = fill(b, FillMethod::Mean, stats);
    CHECK(mean[0] == 5.0);
    CHECK(mean[2] == 3.0);
    CHECK(mean[1] == 1.0);
    const auto fwd = fill(b, FillMethod::Forward, stats);
    // First variable: [5, ., ., .] -> [5, 5, 5, 5]
    // Second variable: [., ., 4, .] -> [mean, mean, 4, 4]
    CHECK(fwd[2] == 5.0);
    CHECK(fwd[6] == 5.0);
    CHECK(fwd[1] == 1.0);
    CHECK(fwd[3] == 1.0);
    CHECK(fwd[5] == 4.0);
    CHECK(fwd[7] == 4.0);
}

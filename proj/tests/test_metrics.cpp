#include "doctest.h"

#include <cmath>

#include "pspace/metrics.hpp"

using namespace pspace;

TEST_CASE("gmean corner cases") {
    CHECK(gmean({10, 0, 90, 0}) == doctest::Approx(1.0)); // perfect
    CHECK(gmean({0, 0, 90, 10}) == doctest::Approx(0.0)); // all-negative on 10% positives
    CHECK(gmean({5, 5, 5, 5}) == doctest::Approx(0.5));   // 50/50 sensitivity/specificity
    CHECK(gmean({9, 6, 4, 1}) == doctest::Approx(0.6));   // sqrt(0.9*0.4)
    CHECK_THROWS_AS(gmean({0, 1, 1, 0}), std::runtime_error);
    CHECK_THROWS_AS(gmean({1, 0, 0, 0}), std::runtime_error);
}

TEST_CASE("gmean is symmetric and bounded") {
    Confusion a{8, 3, 7, 2};                  // sens 0.8, spec 0.7
    Confusion swapped{7, 2, 8, 3};            // sens 0.7, spec 0.8
    CHECK(gmean(a) == doctest::Approx(gmean(swapped)));
    CHECK(gmean(a) <= std::max(a.sensitivity(), a.specificity()));
    CHECK(gmean(a) >= 0.0);
    CHECK(gmean(a) <= 1.0);
}

TEST_CASE("confusion counts a hand case") {
    LabelSet truth, pred;
    truth.labels = {{"a", Label::Positive}, {"b", Label::Negative}, {"c", Label::Negative}};
    pred.labels = {{"a", Label::Positive}, {"b", Label::Positive}, {"c", Label::Negative}};
    auto c = confusion(pred, truth);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.tn == 1);
    CHECK(c.fn == 0);

    auto perfect = confusion(truth, truth);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    LabelSet flipped;
    for (const auto& [id, l] : truth.labels)
        flipped.labels[id] = l == Label::Positive ? Label::Negative : Label::Positive;
    auto inverted = confusion(flipped, truth);
    CHECK(inverted.tp == 0);
    CHECK(inverted.tn == 0);
}

TEST_CASE("confusion requires total coverage") {
    LabelSet truth, pred;
    truth.labels = {{"a", Label::Positive}, {"b", Label::Negative}};
    pred.labels = {{"a", Label::Positive}};
    CHECK_THROWS_WITH_AS(confusion(pred, truth), doctest::Contains("b"), std::runtime_error);
}

TEST_CASE("classified_correct excludes unclassified items") {
    LabelSet truth;
    for (int i = 0; i < 1000; ++i)
        truth.labels["m" + std::to_string(i)] = i < 301 ? Label::Positive : Label::Negative;

    // 893 classified, 533 of them correct
    LabelSet pred;
    int correct = 0, classified = 0;
    for (const auto& [id, l] : truth.labels) {
        if (classified == 893) break;
        bool make_correct = correct < 533;
        pred.labels[id] = make_correct ? l
                                       : (l == Label::Positive ? Label::Negative
                                                               : Label::Positive);
        ++classified;
        if (make_correct) ++correct;
    }
    auto cc = classified_correct(pred, truth);
    CHECK(cc.classified == 893);
    CHECK(cc.correct == 533);
    CHECK(cc.percent_correct == doctest::Approx(59.7).epsilon(0.001));

    auto none = classified_correct(LabelSet{}, truth);
    CHECK(none.classified == 0);
    CHECK(std::isnan(none.percent_correct));

    auto all = classified_correct(truth, truth);
    CHECK(all.percent_correct == doctest::Approx(100.0));
    CHECK(all.correct <= all.classified);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "fpl/environments.hpp"

using namespace fpl;

TEST_CASE("the trap sequence emits the pinned first rounds and stays in {0, 1/2, 1}") {
    auto env = make_fl_killer();
    std::vector<int> history;
    const LossVector r1 = env->next_losses(1, history);
    CHECK(r1[0] == 0.0);
    CHECK(r1[1] == 0.5);
    history.push_back(0);
    const LossVector r2 = env->next_losses(2, history);
    CHECK(r2[0] == 1.0);
    CHECK(r2[1] == 0.0);
    history.push_back(0);
    const LossVector r3 = env->next_losses(3, history);
    CHECK(r3[0] == 0.0);
    CHECK(r3[1] == 1.0);

    double cum0 = 0.0, cum1 = 0.0;
    auto fresh = make_fl_killer();
    std::vector<int> h;
    for (int t = 1; t <= 6; ++t) {
        const LossVector r = fresh->next_losses(t, h);
        CHECK((r[0] == 0.0 || r[0] == 0.5 || r[0] == 1.0));
        CHECK((r[1] == 0.0 || r[1] == 0.5 || r[1] == 1.0));
        cum0 += r[0];
        cum1 += r[1];
        h.push_back(1);
    }
    CHECK(cum0 == doctest::Approx(3.0));
    CHECK(cum1 == doctest::Approx(2.5));   // expert 2 leads at every even horizon
}

TEST_CASE("oblivious environments ignore the decision history") {
    auto env_a = make_bernoulli({0.3, 0.7}, 555);
    auto env_b = make_bernoulli({0.3, 0.7}, 555);
    std::vector<int> ha, hb;
    for (int t = 1; t <= 200; ++t) {
        const LossVector a = env_a->next_losses(t, ha);
        const LossVector b = env_b->next_losses(t, hb);
        CHECK(a[0] == b[0]);
        CHECK(a[1] == b[1]);
        ha.push_back(0);
        hb.push_back(1);   // different histories, same losses
    }
}

TEST_CASE("bernoulli losses are reproducible and hit their mean") {
    auto env = make_bernoulli({0.5, 0.5}, 777);
    std::vector<int> h;
    double sum = 0.0;
    const int rounds = 10'000;
    for (int t = 1; t <= rounds; ++t) {
        const LossVector r = env->next_losses(t, h);
        CHECK((r[0] == 0.0 || r[0] == 1.0));
        sum += r[0];
        h.push_back(0);
    }
    const double mean = sum / rounds;
    const double sigma = std::sqrt(0.25 / rounds);
    CHECK(std::abs(mean - 0.5) <= 3.0 * sigma);

    auto replay = make_bernoulli({0.5, 0.5}, 777);
    std::vector<int> h2;
    const LossVector first = replay->next_losses(1, h2);
    auto again = make_bernoulli({0.5, 0.5}, 777);
    const LossVector first_again = again->next_losses(1, h2);
    CHECK(first[0] == first_again[0]);
    CHECK(first[1] == first_again[1]);
}

TEST_CASE("the punisher charges the previously chosen expert") {
    auto env = make_last_choice_punisher(2);
    std::vector<int> history;
    const LossVector r1 = env->next_losses(1, history);
    CHECK(r1[0] == 0.0);
    CHECK(r1[1] == 0.0);
    history.push_back(1);
    const LossVector r2 = env->next_losses(2, history);
    CHECK(r2[0] == 0.0);
    CHECK(r2[1] == 1.0);
    history.push_back(0);
    const LossVector r3 = env->next_losses(3, history);
    CHECK(r3[0] == 1.0);
    CHECK(r3[1] == 0.0);
}

TEST_CASE("history length must match the round") {
    auto env = make_fl_killer();
    std::vector<int> history;
    CHECK_THROWS_AS(env->next_losses(2, history), std::invalid_argument);
    history.push_back(0);
    CHECK_THROWS_AS(env->next_losses(1, history), std::invalid_argument);
    CHECK_THROWS_AS(env->next_losses(0, {}), std::invalid_argument);
}

TEST_CASE("custom adaptive environments see strictly past decisions") {
    auto env = make_custom_adaptive(2, [](std::int64_t t, std::span<const int> history) {
        double punish = 0.0;
        if (!history.empty() && history.back() == 0) punish = 1.0;
        (void)t;
        return LossVector({punish, 0.0});
    });
    CHECK(env->adaptive());
    std::vector<int> history;
    CHECK(env->next_losses(1, history)[0] == 0.0);
    history.push_back(0);
    CHECK(env->next_losses(2, history)[0] == 1.0);
}

TEST_CASE("fixed tables replay and wrap") {
    auto env = make_fixed({LossVector({0.25, 0.5}), LossVector({1.0, 0.0})});
    std::vector<int> h;
    CHECK(env->next_losses(1, h)[0] == 0.25);
    h.push_back(0);
    CHECK(env->next_losses(2, h)[1] == 0.0);
    h.push_back(0);
    CHECK(env->next_losses(3, h)[0] == 0.25);   // wraps
}

TEST_CASE("loss tables load from CSV with validation") {
    const std::filesystem::path path = std::filesystem::temp_directory_path() / "fpl_losses.csv";
    {
        std::ofstream out(path);
        out << "# one row per round, one column per expert\n";
        out << "0.0, 0.5\n";
        out << "1.0, 0.25\n";
    }
    auto env = load_fixed_csv(path);
    CHECK(env->dimension() == 2);
    std::vector<int> h;
    CHECK(env->next_losses(1, h)[1] == 0.5);

    {
        std::ofstream out(path);
        out << "0.0, 1.5\n";   // out of range
    }
    CHECK_THROWS_WITH_AS(load_fixed_csv(path), doctest::Contains(":1"), std::runtime_error);

    {
        std::ofstream out(path);
        out << "0.0, abc\n";
    }
    CHECK_THROWS_AS(load_fixed_csv(path), std::runtime_error);
    std::remove(path.string().c_str());
}

#include <cmath>

#include "agot/gradcheck.hpp"
#include "agot/mlp.hpp"
#include "agot/ops.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace agot;
using testsup::random_tensor;
using testsup::weighted_sum;

TEST_SUITE_BEGIN("autodiff");

TEST_CASE("matmul identity and projector") {
    Tape tape;
    Tensor eye = Tensor::from_data({2, 2}, {1, 0, 0, 1});
    Tensor m = Tensor::from_data({2, 2}, {1, 2, 3, 4});
    Tensor out = ops::matmul(tape, eye, m);
    CHECK(out.data() == std::vector<double>{1, 2, 3, 4});

    Tensor proj = Tensor::from_data({2, 2}, {1, 0, 0, 0});
    Tensor b = Tensor::from_data({2, 2}, {5, 6, 7, 8});
    Tensor picked = ops::matmul(tape, proj, b);
    CHECK(picked.data() == std::vector<double>{5, 6, 0, 0});
}

TEST_CASE("matmul rejects mismatched inner extents naming both shapes") {
    Tape tape;
    Tensor a = Tensor::zeros({3, 4});
    Tensor b = Tensor::zeros({5, 2});
    CHECK_THROWS_WITH_AS(ops::matmul(tape, a, b),
                         doctest::Contains("[3x4]"), DimensionError);
    try {
        ops::matmul(tape, a, b);
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("[5x2]") != std::string::npos);
    }
}

TEST_CASE("matmul gradients match central finite differences") {
    Tensor a = random_tensor({3, 4}, 11);
    Tensor b = random_tensor({4, 2}, 12);

    auto wrt_a = [&](Tape& tape, const Tensor& x) {
        return weighted_sum(tape, ops::matmul(tape, x, b), 13);
    };
    auto report_a = finite_difference_check(wrt_a, a, 1e-5, 1e-6);
    CHECK(report_a.pass);
    CHECK(report_a.max_rel_err < 1e-6);

    auto wrt_b = [&](Tape& tape, const Tensor& x) {
        return weighted_sum(tape, ops::matmul(tape, a, x), 13);
    };
    auto report_b = finite_difference_check(wrt_b, b, 1e-5, 1e-6);
    CHECK(report_b.pass);
}

TEST_CASE("softmax_lastdim fixed values") {
    Tape tape;
    Tensor sym = ops::softmax_lastdim(tape, Tensor::from_data({2}, {0.0, 0.0}));
    CHECK(sym.data()[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sym.data()[1] == doctest::Approx(0.5).epsilon(1e-14));

    // softmax([ln 2, 0]) = [2, 1] / 3
    Tensor skew = ops::softmax_lastdim(tape, Tensor::from_data({2}, {std::log(2.0), 0.0}));
    CHECK(std::fabs(skew.data()[0] - 2.0 / 3.0) < 1e-15);
    CHECK(std::fabs(skew.data()[1] - 1.0 / 3.0) < 1e-15);

    Tensor large = ops::softmax_lastdim(tape, Tensor::from_data({2}, {1000.0, 1000.0}));
    CHECK(large.all_finite());
    CHECK(large.data()[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("softmax_lastdim slices sum to one and stay in [0,1]") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(mix_seed(seed, 21));
        Tensor x = Tensor::randn({4, 5}, rng, seed % 2 == 0 ? 1.0 : 1e3);
        Tape tape;
        Tensor y = ops::softmax_lastdim(tape, x);
        for (std::size_t r = 0; r < 4; ++r) {
            double total = 0.0;
            for (std::size_t c = 0; c < 5; ++c) {
                const double v = y.at(r, c);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                total += v;
            }
            CHECK(std::fabs(total - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("cosine_similarity endpoint cases") {
    Tape tape;
    Tensor v = Tensor::from_data({3}, {0.3, -1.2, 2.0});
    CHECK(ops::cosine_similarity(tape, v, v).value() == doctest::Approx(1.0).epsilon(1e-12));

    Tensor neg = Tensor::from_data({3}, {-0.3, 1.2, -2.0});
    CHECK(ops::cosine_similarity(tape, v, neg).value() == doctest::Approx(-1.0).epsilon(1e-12));

    Tensor e1 = Tensor::from_data({2}, {1.0, 0.0});
    Tensor e2 = Tensor::from_data({2}, {0.0, 1.0});
    CHECK(ops::cosine_similarity(tape, e1, e2).value() == doctest::Approx(0.0));

    Tensor tiny = Tensor::from_data({2}, {0.0, 0.0});
    CHECK_THROWS_AS(ops::cosine_similarity(tape, tiny, e1), DegenerateInputError);
}

TEST_CASE("mlp3 zero parameters annihilate and identity passes nonnegative input") {
    Tape tape;
    Mlp3Params zero = Mlp3Params::zeros(3, 4, 2);
    Tensor x = Tensor::from_data({3}, {1.0, -2.0, 0.5});
    Tensor out = mlp3_forward(tape, zero, x);
    CHECK(out.data() == std::vector<double>{0.0, 0.0});

    Mlp3Params ident = Mlp3Params::zeros(3, 3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        ident.w1.at_mut(i, i) = 1.0;
        ident.w2.at_mut(i, i) = 1.0;
        ident.w3.at_mut(i, i) = 1.0;
    }
    Tensor nonneg = Tensor::from_data({3}, {0.25, 0.0, 3.0});
    Tensor through = mlp3_forward(tape, ident, nonneg);
    CHECK(through.data() == nonneg.data());
}

TEST_CASE("mlp3 rejects width mismatch") {
    Tape tape;
    Rng rng(5);
    Mlp3Params p = Mlp3Params::init(3, 4, 2, rng);
    CHECK_THROWS_AS(mlp3_forward(tape, p, Tensor::zeros({5})), DimensionError);
}

TEST_CASE("mlp3 gradient of sum(output) matches finite differences for every parameter") {
    Rng rng(99);
    Mlp3Params p = Mlp3Params::init(3, 4, 2, rng);
    // Nonzero biases so the relu pattern is generic.
    p.b1 = random_tensor({4}, 31, 0.5);
    p.b2 = random_tensor({4}, 32, 0.5);
    p.b1.set_requires_grad(true);
    p.b2.set_requires_grad(true);
    Tensor x = random_tensor({3}, 33);

    const Tensor* slots[] = {&p.w1, &p.b1, &p.w2, &p.b2, &p.w3, &p.b3};
    for (const Tensor* slot : slots) {
        Tensor original = *slot;
        auto f = [&](Tape& tape, const Tensor& candidate) {
            Mlp3Params probe = p;
            // route the candidate tensor into the right slot
            if (slot == &p.w1) probe.w1 = candidate;
            if (slot == &p.b1) probe.b1 = candidate;
            if (slot == &p.w2) probe.w2 = candidate;
            if (slot == &p.b2) probe.b2 = candidate;
            if (slot == &p.w3) probe.w3 = candidate;
            if (slot == &p.b3) probe.b3 = candidate;
            return ops::sum(tape, mlp3_forward(tape, probe, x));
        };
        auto report = finite_difference_check(f, original, 1e-5, 1e-6);
        CHECK_MESSAGE(report.pass, "max rel err ", report.max_rel_err);
    }

    auto wrt_input = [&](Tape& tape, const Tensor& candidate) {
        return ops::sum(tape, mlp3_forward(tape, p, candidate));
    };
    CHECK(finite_difference_check(wrt_input, x, 1e-5, 1e-6).pass);
}

TEST_CASE("backward computes d(sum x*x) = 2x and zero for unrelated tensors") {
    Tape tape;
    Tensor x = Tensor::from_data({3}, {1, 2, 3}, true);
    Tensor unrelated = Tensor::from_data({2}, {5, 5}, true);
    Tensor loss = ops::sum(tape, ops::mul(tape, x, x));
    // keep the unrelated branch on the tape
    Tensor side = ops::scale(tape, unrelated, 2.0);
    (void)side;
    tape.backward(loss);
    CHECK(x.grad() == std::vector<double>{2, 4, 6});
    CHECK(unrelated.grad() == std::vector<double>{0, 0});
}

TEST_CASE("backward rejects non-scalar loss") {
    Tape tape;
    Tensor x = Tensor::from_data({2}, {1, 2}, true);
    Tensor y = ops::mul(tape, x, x);
    CHECK_THROWS_AS(tape.backward(y), ContractError);
}

TEST_CASE("backward accumulates: second pass doubles every gradient exactly") {
    Tape tape;
    Tensor x = random_tensor({3, 2}, 77);
    x.set_requires_grad(true);
    Tensor w = random_tensor({2, 3}, 78);
    w.set_requires_grad(true);
    Tensor loss = ops::mean(tape, ops::sigmoid(tape, ops::matmul(tape, x, w)));
    tape.backward(loss);
    const std::vector<double> gx = x.grad();
    const std::vector<double> gw = w.grad();
    tape.backward(loss);
    for (std::size_t i = 0; i < gx.size(); ++i) CHECK(x.grad()[i] == 2.0 * gx[i]);
    for (std::size_t i = 0; i < gw.size(); ++i) CHECK(w.grad()[i] == 2.0 * gw[i]);
}

TEST_CASE("no gradient is attached to requires_grad=false tensors") {
    Tape tape;
    Tensor frozen = random_tensor({2, 2}, 5);
    Tensor live = random_tensor({2, 2}, 6);
    live.set_requires_grad(true);
    Tensor loss = ops::sum(tape, ops::matmul(tape, frozen, live));
    tape.backward(loss);
    CHECK(live.has_grad());
    CHECK(!frozen.has_grad());
}

TEST_CASE("composite graph gradients match finite differences") {
    // matmul -> relu -> softmax -> cross entropy, checked end to end.
    Tensor w = random_tensor({4, 3}, 101);
    Tensor x = random_tensor({2, 4}, 102);
    std::vector<std::size_t> targets = {1, 2};
    auto f = [&](Tape& tape, const Tensor& cand) {
        Tensor h = ops::relu(tape, ops::matmul(tape, x, cand));
        return ops::cross_entropy_rows(tape, ops::scale(tape, h, 3.0), targets);
    };
    auto report = finite_difference_check(f, w, 1e-5, 1e-5);
    CHECK_MESSAGE(report.pass, "max rel err ", report.max_rel_err);
}

TEST_CASE("primitive sweep: analytic gradients vs finite differences, 100 seeded trials") {
    // Inputs are kept away from relu kinks so the central difference is valid.
    int trials = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::uint64_t s = mix_seed(seed, 0xF00D);
        Tensor a = random_tensor({3, 4}, s);
        Tensor b = random_tensor({3, 4}, s + 1);
        Tensor u = random_tensor({5}, s + 2);
        Tensor v = random_tensor({5}, s + 3);
        Tensor m = random_tensor({3, 4}, s + 4);
        Tensor n = random_tensor({4, 2}, s + 5);
        Tensor sc = random_tensor({}, s + 6);

        struct Case {
            const char* name;
            TensorFunction fn;
            Tensor wrt;
        };
        auto wsum = [s](Tape& t, const Tensor& x) { return weighted_sum(t, x, s + 9); };
        std::vector<Case> cases = {
            {"matmul", [&](Tape& t, const Tensor& x) { return wsum(t, ops::matmul(t, x, n)); }, m},
            {"transpose", [&](Tape& t, const Tensor& x) { return wsum(t, ops::transpose(t, x)); }, m},
            {"reshape", [&](Tape& t, const Tensor& x) { return wsum(t, ops::reshape(t, x, {12})); }, m},
            {"add", [&](Tape& t, const Tensor& x) { return wsum(t, ops::add(t, x, b)); }, a},
            {"sub", [&](Tape& t, const Tensor& x) { return wsum(t, ops::sub(t, b, x)); }, a},
            {"mul", [&](Tape& t, const Tensor& x) { return wsum(t, ops::mul(t, x, b)); }, a},
            {"scale", [&](Tape& t, const Tensor& x) { return wsum(t, ops::scale(t, x, -1.7)); }, a},
            {"mul_scalar_s",
             [&](Tape& t, const Tensor& x) { return wsum(t, ops::mul_scalar(t, x, a)); }, sc},
            {"mul_scalar_t",
             [&](Tape& t, const Tensor& x) { return wsum(t, ops::mul_scalar(t, sc, x)); }, a},
            {"relu",
             [&](Tape& t, const Tensor& x) {
                 // shift away from the kink
                 Tensor off = ops::add(t, x, Tensor::full(x.shape(), 0.35));
                 return wsum(t, ops::relu(t, off));
             },
             a},
            {"sigmoid", [&](Tape& t, const Tensor& x) { return wsum(t, ops::sigmoid(t, x)); }, a},
            {"softmax", [&](Tape& t, const Tensor& x) { return wsum(t, ops::softmax_lastdim(t, x)); }, a},
            {"sum", [&](Tape& t, const Tensor& x) { return ops::sum(t, x); }, a},
            {"mean", [&](Tape& t, const Tensor& x) { return ops::mean(t, x); }, a},
            {"mean_rows", [&](Tape& t, const Tensor& x) { return wsum(t, ops::mean_rows(t, x)); }, a},
            {"concat_rows",
             [&](Tape& t, const Tensor& x) {
                 return wsum(t, ops::concat_rows(t, {x, b}));
             },
             a},
            {"l2_norm", [&](Tape& t, const Tensor& x) { return ops::l2_norm(t, x); }, u},
            {"l2_normalize",
             [&](Tape& t, const Tensor& x) { return wsum(t, ops::l2_normalize(t, x)); }, u},
            {"cosine",
             [&](Tape& t, const Tensor& x) { return ops::cosine_similarity(t, x, v); }, u},
            {"cross_entropy",
             [&](Tape& t, const Tensor& x) {
                 return ops::cross_entropy_rows(t, x, {1, 3, 0});
             },
             m},
        };
        for (const auto& c : cases) {
            auto report = finite_difference_check(c.fn, c.wrt, 1e-5, 1e-6);
            REQUIRE_MESSAGE(report.pass, c.name, " seed ", seed, " max rel err ",
                            report.max_rel_err);
            ++trials;
        }
    }
    CHECK(trials >= 100);
}

TEST_CASE("finite_difference_check reference functions") {
    // quadratic: exact central difference
    auto square = [](Tape& tape, const Tensor& x) { return ops::mul(tape, x, x); };
    auto rep = finite_difference_check(square, Tensor::scalar(3.0), 1e-5, 1e-6);
    CHECK(std::fabs(rep.numeric[0] - 6.0) < 1e-8);
    CHECK(std::fabs(rep.analytic[0] - 6.0) < 1e-12);

    // sigmoid'(0) = 1/4
    auto sig = [](Tape& tape, const Tensor& x) { return ops::sigmoid(tape, x); };
    auto rep2 = finite_difference_check(sig, Tensor::scalar(0.0), 1e-5, 1e-6);
    CHECK(std::fabs(rep2.numeric[0] - 0.25) < 1e-8);

    // constant function: all estimates zero
    auto constant = [](Tape&, const Tensor&) { return Tensor::scalar(4.2); };
    auto rep3 = finite_difference_check(constant, Tensor::from_data({3}, {1, 2, 3}), 1e-5, 1e-6);
    for (double v : rep3.numeric) CHECK(v == 0.0);
    CHECK(rep3.pass);

    // non-scalar outputs are rejected
    auto vec = [](Tape&, const Tensor&) { return Tensor::zeros({2}); };
    CHECK_THROWS_AS(finite_difference_check(vec, Tensor::scalar(1.0), 1e-5, 1e-6), ContractError);
}

TEST_CASE("seeded tensor construction is bit-identical across runs") {
    Rng r1(424242), r2(424242);
    Tensor a = Tensor::randn({4, 4}, r1, 1.0);
    Tensor b = Tensor::randn({4, 4}, r2, 1.0);
    CHECK(a.data() == b.data());
}

TEST_SUITE_END();

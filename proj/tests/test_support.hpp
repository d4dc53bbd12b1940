#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "agot/ops.hpp"
#include "agot/rng.hpp"
#include "agot/tensor.hpp"

namespace testsup {

// Deterministic pseudo-random tensor with entries ~ N(0, 1).
inline agot::Tensor random_tensor(agot::Shape shape, std::uint64_t seed, double sigma = 1.0) {
    agot::Rng rng(agot::mix_seed(seed, 0xA11CE));
    return agot::Tensor::randn(std::move(shape), rng, sigma);
}

// Reduce an arbitrary tensor to a scalar with fixed pseudo-random weights so
// finite differences see a generic linear functional of the op output.
inline agot::Tensor weighted_sum(agot::Tape& tape, const agot::Tensor& t, std::uint64_t seed) {
    agot::Rng rng(agot::mix_seed(seed, 0xBEEF));
    agot::Tensor w = agot::Tensor::randn(t.shape(), rng, 1.0);
    return agot::ops::sum(tape, agot::ops::mul(tape, t, w));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > worst) worst = d;
    }
    return worst;
}

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("agot_test_" + tag + "_" + std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    static inline int counter_ = 0;
};

}  // namespace testsup

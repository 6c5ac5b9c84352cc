#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anyplace/arm.hpp"
#include "anyplace/mlp.hpp"
#include "anyplace/planner.hpp"
#include "anyplace/scene.hpp"

namespace anyplace {

/// Estimates at or above this are predicted planning failures.
inline constexpr double kTauFail = 15.0;

using PceInput = std::array<double, 12>;

/// to_vec6(g_i) ++ to_vec6(g_j).
PceInput pce_input(const Pose& g_i, const Pose& g_j);

struct PceSample {
    PceInput input{};
    double label = kFailureCost;
    bool success = false;
};

/// Path cost estimator: MLP [12, 100, 10, 1] on normalized pose pairs. The
/// network regresses label / output_scale.
struct CostNet {
    Mlp net;
    std::vector<float> input_scale;  ///< x_normalized = x / scale
    float output_scale = 20.0f;
    AdamOptions adam;
    double tau_fail = kTauFail;

    static CostNet create(std::uint64_t seed, const std::vector<int>& hidden = {100, 10});

    Mlp::Vector encode(const PceInput& x) const;
    /// Estimated path cost, clamped at zero.
    double predict(const PceInput& x) const;
    double predict(const Pose& g_i, const Pose& g_j) const { return predict(pce_input(g_i, g_j)); }
    bool feasible(double estimate) const { return estimate < tau_fail; }

    std::string to_json() const;
    static CostNet from_json(const std::string& text);
    void save(const std::filesystem::path& path, const std::string& provenance = {}) const;
    static CostNet load(const std::filesystem::path& path);
};

/// Sampling volume for PCE training poses.
struct PoseBox {
    Vec3 lo{-0.6, -0.4, 0.02};
    Vec3 hi{0.6, 0.4, 0.6};
    double max_tilt = M_PI / 2.0;  ///< approach axis from straight down
};

/// Uniform position in the box, uniform orientation on SO(3) rejected until
/// the tool z-axis is within max_tilt of straight down.
Pose random_downward_pose(std::mt19937_64& rng, const PoseBox& box = {});

/// One plan per sample with seed mix_seed(seed, i); results are independent
/// of the worker count.
std::vector<PceSample> collect_dataset(const ArmModel& arm, const SceneSpec& scene, int count, std::uint64_t seed,
                                       int workers = 1, const PlanOptions& opts = {}, const PoseBox& box = {});

std::string dataset_to_csv(const std::vector<PceSample>& samples, const std::string& provenance = {});
std::vector<PceSample> parse_dataset_csv(std::string_view text, const std::string& source = "<csv>");
std::vector<PceSample> load_dataset(const std::filesystem::path& path);

struct TrainOptions {
    int epochs = 200;
    int batch = 64;
    std::uint64_t seed = 0;
};

/// Mini-batch Adam on MSE; returns the mean loss of every epoch. Throws
/// std::runtime_error on a non-finite loss.
std::vector<double> train(CostNet& pce, const std::vector<PceSample>& data, const TrainOptions& opts);

/// Generic epoch loop shared by the learned components.
std::vector<double> fit(Mlp& net, Adam& adam, const Mlp::Matrix& x, const Mlp::Vector& y, int epochs, int batch,
                        std::uint64_t seed, Loss loss);

struct PceEvaluation {
    std::size_t samples = 0;
    double classification_rate = 0.0;  ///< predicted class (estimate < tau) == sample.success
    double mean_abs_error = 0.0;
    double mean_inference_seconds = 0.0;  ///< wall clock
    std::size_t true_feasible = 0;
    std::size_t predicted_feasible = 0;
};

PceEvaluation evaluate(const CostNet& pce, const std::vector<PceSample>& test, int timing_calls = 10000);

}  // namespace anyplace

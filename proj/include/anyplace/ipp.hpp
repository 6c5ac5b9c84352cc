#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "anyplace/cost_net.hpp"
#include "anyplace/grasp.hpp"
#include "anyplace/stability.hpp"

namespace anyplace {

inline constexpr int kFeatureSize = 25;
using Features = std::array<float, kFeatureSize>;

/// Divisors applied to the raw feature blocks.
struct FeatureScales {
    float translation = 1.0f;
    float rotation = static_cast<float>(M_PI);
    float extent = 0.1f;
    float volume = 1e-3f;
    float offset = 0.1f;
};

/// to_vec6(candidate) ++ to_vec6(p_0) ++ to_vec6(p_T) ++ shape descriptor,
/// each block divided by its scale.
Features featurize(const ShapeDescriptor& shape, const Pose& candidate, const Pose& p_0, const Pose& p_T,
                   const FeatureScales& scales = {});

/// The segments of a manipulation through p_I. A direct pair (iI < 0,
/// gI = g_0 moved to p_T) gives the two segments g_cur -> g_0 (free) and
/// g_0 -> g_0^T (carry); otherwise g_cur -> g_0, g_0 -> g_0^I (carry),
/// g_0^I -> g_I, g_I -> g_I^T (carry).
std::vector<Segment> chain_segments(const Pose& g_cur, const GraspPair& pair, const Pose& p_0, const Pose& p_I,
                                    const Pose& p_T);

struct PairEstimate {
    bool found = false;
    std::size_t index = 0;  ///< into the pair list
    GraspPair pair;
    double m_star = std::numeric_limits<double>::infinity();
    std::vector<double> segments;  ///< estimates of the chosen chain
};

/// Estimated chain cost of one pair, segment by segment.
std::vector<double> estimate_chain(const CostNet& pce, const std::vector<Segment>& segments);

/// Argmin over valid pairs of the summed segment estimates (first index on
/// ties). No valid pair gives found = false and m_star = +inf.
PairEstimate best_grasp_pair(const CostNet& pce, const Pose& g_cur, const std::vector<GraspPair>& pairs,
                             const Pose& p_0, const Pose& p_I, const Pose& p_T);

struct Reward {
    double reward = 0.0;
    bool success = false;
    double cost = 100.0;
};

/// 5 + success_term - cost / 20, success_term 2 or 0, cost 10 m or 100.
Reward episode_reward(bool success, double m);
/// Success iff an estimate exists and every segment estimate is below tau.
Reward pseudo_reward(const PairEstimate& est, double tau = kTauFail);

/// Ring buffer of (features, reward) with uniform sampling with replacement.
class ReplayBuffer {
public:
    struct Entry {
        Features x{};
        Reward r;
    };

    explicit ReplayBuffer(std::size_t capacity = 50000);
    void push(const Features& x, const Reward& r);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Entry& operator[](std::size_t i) const { return data_[i]; }
    std::vector<const Entry*> sample(std::size_t n, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Entry> data_;
};

/// Per-candidate Q-value network [25, 128, 128, 1] with a target copy.
/// Episodes are single decisions, so targets are the terminal rewards and
/// gamma is carried only as configuration.
struct QModel {
    Mlp net;
    Mlp target;
    FeatureScales scales;
    AdamOptions adam;
    int sync_period = 500;
    long long updates = 0;
    double gamma = 0.9;

    static QModel create(std::uint64_t seed, const std::vector<int>& hidden = {128, 128});

    float q(const Features& x) const;
    /// Q for every row; same arithmetic as q() row by row.
    std::vector<float> q_all(const std::vector<Features>& xs) const;
    /// One Huber/Adam step on a batch; syncs the target every sync_period
    /// updates. Returns the batch loss.
    double update(Adam& opt, const std::vector<const ReplayBuffer::Entry*>& batch);

    std::string to_json() const;
    static QModel from_json(const std::string& text);
    void save(const std::filesystem::path& path, const std::string& provenance = {}) const;
    static QModel load(const std::filesystem::path& path);
};

/// Greedy index: highest value, ties by higher probability, then lower index.
std::size_t greedy_choice(const std::vector<float>& values, const std::vector<double>& probability);

/// An object with its object-frame grasps computed once.
struct TaskObject {
    ObjectModelPtr model;
    std::vector<GraspCandidate> grasps;
};
using TaskObjectPtr = std::shared_ptr<const TaskObject>;

std::vector<TaskObjectPtr> make_task_objects(const std::vector<ObjectModelPtr>& models, const ArmModel& arm,
                                             const GraspOptions& opts = {});

/// Training placements: stable poses (drawn by probability) with uniform
/// yaw, at uniform (x, y) in this rectangle.
struct TaskRegion {
    double x_lo = -0.12, x_hi = 0.12;
    double y_lo = -0.02, y_hi = 0.14;
};

struct Task {
    std::size_t object = 0;  ///< index into the task object list
    Pose p_0;
    Pose p_T;
};

Pose sample_placement(const ObjectModel& model, const TaskRegion& region, std::mt19937_64& rng);
Task sample_task(const std::vector<TaskObjectPtr>& objects, const TaskRegion& region, std::mt19937_64& rng);

/// Everything needed to evaluate candidates of one task: the scene with the
/// object at p_0, the grasps at p_0, and the candidate set.
struct TaskContext {
    TaskObjectPtr object;
    SceneSpec scene;
    Pose g_cur;
    Pose p_0;
    Pose p_T;
    CandidateSet candidates;
    std::vector<GraspCandidate> G0;
};

struct CandidateOptions {
    int m = 5;
    int n = 6;
    int k = 16;
    double alpha = 0.4;
};

TaskContext make_context(const TaskObjectPtr& object, const ArmModel& arm, const SceneSpec& scene, const Pose& g_cur,
                         const Pose& p_0, const Pose& p_T, const CandidateOptions& opts = {});
/// Single-object scene: the object alone on the table at p_0.
SceneSpec task_scene(const TaskObjectPtr& object, const Pose& p_0);
/// Grasp pairs of candidate c (direct pairs for the goal).
std::vector<GraspPair> candidate_pairs(const TaskContext& ctx, std::size_t c, const ArmModel& arm,
                                       const CandidateOptions& opts = {});
std::vector<Features> candidate_features(const TaskContext& ctx, const FeatureScales& scales);

struct EpisodeRecord {
    long long episode = 0;
    double seconds = 0.0;  ///< on the chosen clock, cumulative
    std::size_t object = 0;
    std::size_t chosen = 0;
    bool chose_goal = false;
    Reward reward;
    std::uint64_t plan_calls = 0;
};

struct IppTrainOptions {
    int episodes = 4000;
    double eps_start = 0.5;
    double eps_end = 0.1;
    double anneal_fraction = 0.8;
    int batch = 64;
    int updates_per_episode = 1;
    std::size_t replay_capacity = 50000;
    std::uint64_t seed = 0;
    ClockKind clock = ClockKind::Work;
    CandidateOptions candidates;
    TaskRegion region;
    /// Real-reward training only: valid pairs tried in quality order until
    /// one chain plans.
    int real_pairs = 4;
    PlanOptions plan;
    /// Refinement only.
    int pce_finetune_period = 200;
    int pce_finetune_epochs = 5;
    /// Stop once the trailing mean over `stop_window` episodes reaches
    /// `stop_reward` (disabled when stop_window is 0).
    int stop_window = 0;
    double stop_reward = 0.0;
    /// Stop when the clock passes this many seconds (disabled when <= 0).
    double time_limit = 0.0;
};

double epsilon_at(const IppTrainOptions& opts, long long episode);

struct TrainResult {
    std::vector<EpisodeRecord> trace;
    bool stopped_early = false;
};

/// Pretraining on pseudo rewards from the PCE only. Never calls the planner.
TrainResult pretrain(QModel& q, const CostNet& pce, const ArmModel& arm, const std::vector<TaskObjectPtr>& objects,
                     const IppTrainOptions& opts);

/// Ablation: the same loop with rewards from real planned chains.
TrainResult pretrain_real(QModel& q, const ArmModel& arm, const std::vector<TaskObjectPtr>& objects,
                          const IppTrainOptions& opts);

/// Refinement: real rewards for the PCE-chosen pair; real segment labels are
/// appended to `pce_data` and the PCE is fine-tuned periodically.
TrainResult refine(QModel& q, CostNet& pce, std::vector<PceSample>& pce_data, const ArmModel& arm,
                   const std::vector<TaskObjectPtr>& objects, const IppTrainOptions& opts);

/// Real-execution reward of the PCE-chosen pair for the candidate picked
/// greedily by q (or always the goal when q is null).
Reward evaluate_real(const QModel* q, const CostNet& pce, const ArmModel& arm, const TaskObjectPtr& object,
                     const Task& task, std::uint64_t seed, const IppTrainOptions& opts);

std::string trace_to_csv(const std::vector<EpisodeRecord>& trace, const std::string& provenance = {});
double trailing_mean(const std::vector<EpisodeRecord>& trace, std::size_t window);

}  // namespace anyplace

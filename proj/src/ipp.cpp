#include "anyplace/ipp.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "anyplace/text_io.hpp"
#include "mlp_json.hpp"

namespace anyplace {

Features featurize(const ShapeDescriptor& shape, const Pose& candidate, const Pose& p_0, const Pose& p_T,
                   const FeatureScales& scales)
{
    Features f{};
    int k = 0;
    for (const Pose* p : {&candidate, &p_0, &p_T}) {
        const PoseVec6 v = to_vec6(*p);
        for (int i = 0; i < 3; ++i) {
            f[k++] = static_cast<float>(v[i]) / scales.translation;
        }
        for (int i = 3; i < 6; ++i) {
            f[k++] = static_cast<float>(v[i]) / scales.rotation;
        }
    }
    const auto d = shape.values();
    for (int i = 0; i < 3; ++i) {
        f[k++] = static_cast<float>(d[i]) / scales.extent;
    }
    f[k++] = static_cast<float>(d[3]) / scales.volume;
    for (int i = 4; i < 7; ++i) {
        f[k++] = static_cast<float>(d[i]) / scales.offset;
    }
    return f;
}

std::vector<Segment> chain_segments(const Pose& g_cur, const GraspPair& pair, const Pose& p_0, const Pose& p_I,
                                    const Pose& p_T)
{
    if (pair.iI < 0) {
        return {Segment{g_cur, pair.g0.pose, false}, Segment{pair.g0.pose, pair.gI.pose, true}};
    }
    const Pose g0I = retarget_grasp(pair.g0.pose, p_0, p_I);
    const Pose gIT = retarget_grasp(pair.gI.pose, p_I, p_T);
    return {Segment{g_cur, pair.g0.pose, false}, Segment{pair.g0.pose, g0I, true}, Segment{g0I, pair.gI.pose, false},
            Segment{pair.gI.pose, gIT, true}};
}

std::vector<double> estimate_chain(const CostNet& pce, const std::vector<Segment>& segments)
{
    std::vector<double> out;
    for (const auto& s : segments) {
        out.push_back(pce.predict(s.from, s.to));
    }
    return out;
}

PairEstimate best_grasp_pair(const CostNet& pce, const Pose& g_cur, const std::vector<GraspPair>& pairs,
                             const Pose& p_0, const Pose& p_I, const Pose& p_T)
{
    PairEstimate best;
    // Segments that depend on one grasp only are estimated once per grasp.
    std::vector<std::array<double, 2>> by_g0;
    std::vector<double> by_gI;
    std::vector<char> have_g0, have_gI;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const GraspPair& p = pairs[i];
        if (!p.valid) {
            continue;
        }
        const auto segs = chain_segments(g_cur, p, p_0, p_I, p_T);
        std::vector<double> est(segs.size());
        const std::size_t a = static_cast<std::size_t>(std::max(0, p.i0));
        if (p.i0 >= 0) {
            if (by_g0.size() <= a) {
                by_g0.resize(a + 1);
                have_g0.resize(a + 1, 0);
            }
        }
        if (p.iI < 0) {
            est[0] = pce.predict(segs[0].from, segs[0].to);
            est[1] = pce.predict(segs[1].from, segs[1].to);
        } else {
            if (p.i0 >= 0 && have_g0[a]) {
                est[0] = by_g0[a][0];
                est[1] = by_g0[a][1];
            } else {
                est[0] = pce.predict(segs[0].from, segs[0].to);
                est[1] = pce.predict(segs[1].from, segs[1].to);
                if (p.i0 >= 0) {
                    by_g0[a] = {est[0], est[1]};
                    have_g0[a] = 1;
                }
            }
            est[2] = pce.predict(segs[2].from, segs[2].to);
            const std::size_t b = static_cast<std::size_t>(p.iI);
            if (by_gI.size() <= b) {
                by_gI.resize(b + 1);
                have_gI.resize(b + 1, 0);
            }
            if (!have_gI[b]) {
                by_gI[b] = pce.predict(segs[3].from, segs[3].to);
                have_gI[b] = 1;
            }
            est[3] = by_gI[b];
        }
        double sum = 0.0;
        for (double e : est) {
            sum += e;
        }
        if (!best.found || sum < best.m_star) {
            best.found = true;
            best.index = i;
            best.pair = p;
            best.m_star = sum;
            best.segments = est;
        }
    }
    return best;
}

Reward episode_reward(bool success, double m)
{
    Reward r;
    r.success = success;
    r.cost = success ? 10.0 * m : 100.0;
    r.reward = 5.0 + (success ? 2.0 : 0.0) - r.cost / 20.0;
    return r;
}

Reward pseudo_reward(const PairEstimate& est, double tau)
{
    bool ok = est.found && std::isfinite(est.m_star);
    for (double s : est.segments) {
        ok = ok && s < tau;
    }
    return episode_reward(ok, est.m_star);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) {
        throw std::invalid_argument("replay capacity must be positive");
    }
}

void ReplayBuffer::push(const Features& x, const Reward& r)
{
    if (data_.size() < capacity_) {
        data_.push_back(Entry{x, r});
    } else {
        data_[next_] = Entry{x, r};
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<const ReplayBuffer::Entry*> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const
{
    if (data_.empty()) {
        throw std::logic_error("sampling from an empty replay buffer");
    }
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<const Entry*> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(&data_[pick(rng)]);
    }
    return out;
}

QModel QModel::create(std::uint64_t seed, const std::vector<int>& hidden)
{
    QModel m;
    std::vector<int> sizes{kFeatureSize};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    m.net = Mlp(sizes);
    std::mt19937_64 rng(seed);
    m.net.init(rng);
    m.target = m.net;
    return m;
}

namespace {

Mlp::Vector to_vector(const Features& x)
{
    Mlp::Vector v(kFeatureSize);
    for (int i = 0; i < kFeatureSize; ++i) {
        v[i] = x[i];
    }
    return v;
}

}  // namespace

float QModel::q(const Features& x) const { return net.forward1(to_vector(x)); }

std::vector<float> QModel::q_all(const std::vector<Features>& xs) const
{
    std::vector<float> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        out.push_back(q(x));
    }
    return out;
}

double QModel::update(Adam& opt, const std::vector<const ReplayBuffer::Entry*>& batch)
{
    Mlp::Matrix x(static_cast<Eigen::Index>(batch.size()), kFeatureSize);
    Mlp::Vector y(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& e = *batch[i];
        const double expected = 5.0 + (e.r.success ? 2.0 : 0.0) - e.r.cost / 20.0;
        if (expected != e.r.reward || (!e.r.success && e.r.cost != 100.0)) {
            throw std::logic_error("replay entry violates the episode reward identity");
        }
        for (int k = 0; k < kFeatureSize; ++k) {
            x(static_cast<Eigen::Index>(i), k) = e.x[k];
        }
        y(static_cast<Eigen::Index>(i)) = static_cast<float>(e.r.reward);
    }
    Mlp::Gradients g;
    const float loss = net.loss_and_gradients(x, y, Loss::Huber, g);
    if (!std::isfinite(loss)) {
        throw std::runtime_error("non-finite Q loss at update " + std::to_string(updates));
    }
    opt.step(net, g);
    if (!net.finite()) {
        throw std::runtime_error("non-finite Q parameters after update " + std::to_string(updates));
    }
    ++updates;
    if (sync_period > 0 && updates % sync_period == 0) {
        target = net;
    }
    return loss;
}

std::string QModel::to_json() const
{
    nlohmann::json j;
    j["format"] = "anyplace-checkpoint";
    j["version"] = 1;
    j["kind"] = "q_model";
    j["network"] = detail::mlp_to_json(net);
    j["target_network"] = detail::mlp_to_json(target);
    j["normalization"] = {{"translation", scales.translation}, {"rotation", scales.rotation},
                          {"extent", scales.extent},           {"volume", scales.volume},
                          {"offset", scales.offset}};
    j["adam"] = detail::adam_to_json(adam);
    j["sync_period"] = sync_period;
    j["updates"] = updates;
    j["gamma"] = gamma;
    return j.dump(1) + "\n";
}

QModel QModel::from_json(const std::string& text)
{
    const auto j = detail::parse_checkpoint(text, "q_model");
    QModel m;
    m.net = detail::mlp_from_json(j.at("network"));
    m.target = detail::mlp_from_json(j.at("target_network"));
    if (m.net.inputs() != kFeatureSize || m.net.outputs() != 1 || m.target.sizes != m.net.sizes) {
        throw FormatError("q_model checkpoint must map 25 features to 1 value");
    }
    const auto& n = j.at("normalization");
    m.scales.translation = n.at("translation").get<float>();
    m.scales.rotation = n.at("rotation").get<float>();
    m.scales.extent = n.at("extent").get<float>();
    m.scales.volume = n.at("volume").get<float>();
    m.scales.offset = n.at("offset").get<float>();
    m.adam = detail::adam_from_json(j.at("adam"));
    m.sync_period = j.at("sync_period").get<int>();
    m.updates = j.at("updates").get<long long>();
    m.gamma = j.at("gamma").get<double>();
    return m;
}

void QModel::save(const std::filesystem::path& path, const std::string& provenance) const
{
    write_file(path, (provenance.empty() ? "" : "// " + provenance + "\n") + to_json());
}

QModel QModel::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

std::size_t greedy_choice(const std::vector<float>& values, const std::vector<double>& probability)
{
    if (values.empty()) {
        throw std::invalid_argument("greedy_choice over no candidates");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best] || (values[i] == values[best] && probability[i] > probability[best])) {
            best = i;
        }
    }
    return best;
}

std::vector<TaskObjectPtr> make_task_objects(const std::vector<ObjectModelPtr>& models, const ArmModel& arm,
                                             const GraspOptions& opts)
{
    std::vector<TaskObjectPtr> out;
    for (const auto& m : models) {
        auto t = std::make_shared<TaskObject>();
        t->model = m;
        t->grasps = object_grasps(m->hull, arm.gripper, opts);
        out.push_back(std::move(t));
    }
    return out;
}

Pose sample_placement(const ObjectModel& model, const TaskRegion& region, std::mt19937_64& rng)
{
    if (model.stable.empty()) {
        throw std::invalid_argument("object " + model.name + " has no stable pose");
    }
    std::vector<double> w;
    for (const auto& s : model.stable) {
        w.push_back(s.probability);
    }
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const StablePose& s = model.stable[pick(rng)];
    const double yaw = -M_PI + 2.0 * M_PI * u(rng);
    const double x = region.x_lo + (region.x_hi - region.x_lo) * u(rng);
    const double y = region.y_lo + (region.y_hi - region.y_lo) * u(rng);
    const Pose spin = Pose::from_axis_angle(Vec3::UnitZ(), yaw);
    Pose p = spin * s.pose;
    return Pose::from_translation(Vec3(x, y, 0.0)) * p;
}

Task sample_task(const std::vector<TaskObjectPtr>& objects, const TaskRegion& region, std::mt19937_64& rng)
{
    if (objects.empty()) {
        throw std::invalid_argument("no task objects");
    }
    std::uniform_int_distribution<std::size_t> pick(0, objects.size() - 1);
    Task t;
    t.object = pick(rng);
    t.p_0 = sample_placement(*objects[t.object]->model, region, rng);
    t.p_T = sample_placement(*objects[t.object]->model, region, rng);
    return t;
}

SceneSpec task_scene(const TaskObjectPtr& object, const Pose& p_0)
{
    return make_scene({}, {{object->model, p_0}}, 0);
}

TaskContext make_context(const TaskObjectPtr& object, const ArmModel& arm, const SceneSpec& scene, const Pose& g_cur,
                         const Pose& p_0, const Pose& p_T, const CandidateOptions& opts)
{
    TaskContext c;
    c.object = object;
    c.scene = scene;
    c.g_cur = g_cur;
    c.p_0 = p_0;
    c.p_T = p_T;
    c.candidates = candidate_set(object->model->hull, object->model->stable, p_0, p_T, opts.m, opts.n);
    c.G0 = sample_grasps(object->grasps, p_0, arm, scene, opts.k, opts.alpha);
    return c;
}

std::vector<GraspPair> candidate_pairs(const TaskContext& ctx, std::size_t c, const ArmModel& arm,
                                       const CandidateOptions& opts)
{
    if (ctx.candidates.is_goal(c)) {
        return direct_pairs(ctx.G0, ctx.p_0, ctx.p_T, arm, ctx.scene);
    }
    const Pose& p_I = ctx.candidates.candidates[c];
    const auto GI = sample_grasps(ctx.object->grasps, p_I, arm, ctx.scene, opts.k, opts.alpha);
    return grasp_pairs(ctx.G0, GI, ctx.p_0, p_I, ctx.p_T, arm, ctx.scene);
}

std::vector<Features> candidate_features(const TaskContext& ctx, const FeatureScales& scales)
{
    std::vector<Features> out;
    for (const auto& p : ctx.candidates.candidates) {
        out.push_back(featurize(ctx.object->model->descriptor, p, ctx.p_0, ctx.p_T, scales));
    }
    return out;
}

double epsilon_at(const IppTrainOptions& opts, long long episode)
{
    const double span = opts.anneal_fraction * opts.episodes;
    if (span <= 0.0 || episode >= span) {
        return opts.eps_end;
    }
    return opts.eps_start + (opts.eps_end - opts.eps_start) * (static_cast<double>(episode) / span);
}

namespace {

using RewardFn = std::function<Reward(const TaskContext&, std::size_t chosen, std::uint64_t episode_seed)>;

Pose task_p_I(const TaskContext& ctx, std::size_t c) { return ctx.candidates.candidates[c]; }

// Shared single-decision DQN loop.
TrainResult run_training(QModel& q, const ArmModel& arm, const std::vector<TaskObjectPtr>& objects,
                         const IppTrainOptions& opts, const RewardFn& reward_fn,
                         const std::function<void(long long)>& after_episode = {})
{
    TrainResult out;
    ReplayBuffer replay(opts.replay_capacity);
    Adam adam(q.net, q.adam);
    std::mt19937_64 train_rng(mix_seed(opts.seed, 0x7121));
    auto clock = make_clock(opts.clock);
    const Pose g_cur = home_pose(arm);
    double window_sum = 0.0;
    for (long long ep = 0; ep < opts.episodes; ++ep) {
        const std::uint64_t ep_seed = mix_seed(opts.seed, static_cast<std::uint64_t>(ep));
        std::mt19937_64 rng(ep_seed);
        const Task task = sample_task(objects, opts.region, rng);
        const auto& obj = objects[task.object];
        const TaskContext ctx =
            make_context(obj, arm, task_scene(obj, task.p_0), g_cur, task.p_0, task.p_T, opts.candidates);
        const auto feats = candidate_features(ctx, q.scales);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::size_t chosen;
        if (u(rng) < epsilon_at(opts, ep)) {
            chosen = std::uniform_int_distribution<std::size_t>(0, feats.size() - 1)(rng);
        } else {
            chosen = greedy_choice(q.q_all(feats), ctx.candidates.probability);
        }
        const auto calls_before = work::local()[work::Op::PlanCall];
        const Reward r = reward_fn(ctx, chosen, mix_seed(ep_seed, 0xC4A1));
        replay.push(feats[chosen], r);
        if (replay.size() >= static_cast<std::size_t>(opts.batch)) {
            for (int k = 0; k < opts.updates_per_episode; ++k) {
                q.update(adam, replay.sample(static_cast<std::size_t>(opts.batch), train_rng));
            }
        }
        if (after_episode) {
            after_episode(ep);
        }
        EpisodeRecord rec;
        rec.episode = ep;
        rec.seconds = clock->elapsed();
        rec.object = task.object;
        rec.chosen = chosen;
        rec.chose_goal = ctx.candidates.is_goal(chosen);
        rec.reward = r;
        rec.plan_calls = work::local()[work::Op::PlanCall] - calls_before;
        out.trace.push_back(rec);
        window_sum += r.reward;
        if (opts.stop_window > 0) {
            const auto w = static_cast<std::size_t>(opts.stop_window);
            if (out.trace.size() > w) {
                window_sum -= out.trace[out.trace.size() - 1 - w].reward.reward;
            }
            if (out.trace.size() >= w && window_sum / w >= opts.stop_reward) {
                out.stopped_early = true;
                break;
            }
        }
        if (opts.time_limit > 0.0 && rec.seconds > opts.time_limit) {
            out.stopped_early = true;
            break;
        }
    }
    return out;
}

struct RealOutcome {
    Reward reward;
    ChainResult chain;
    std::vector<Segment> segments;
};

RealOutcome plan_pair(const ArmModel& arm, const TaskContext& ctx, std::size_t c, const GraspPair& pair,
                      std::uint64_t seed, const PlanOptions& plan_opts)
{
    RealOutcome o;
    o.segments = chain_segments(ctx.g_cur, pair, ctx.p_0, task_p_I(ctx, c), ctx.p_T);
    o.chain = plan_segment_chain(arm, ctx.scene, o.segments, seed, plan_opts, JointConfig::Zero());
    o.reward = episode_reward(o.chain.success, o.chain.total_cost);
    return o;
}

}  // namespace

TrainResult pretrain(QModel& q, const CostNet& pce, const ArmModel& arm, const std::vector<TaskObjectPtr>& objects,
                     const IppTrainOptions& opts)
{
    auto fn = [&](const TaskContext& ctx, std::size_t c, std::uint64_t) {
        const auto pairs = candidate_pairs(ctx, c, arm, opts.candidates);
        return pseudo_reward(best_grasp_pair(pce, ctx.g_cur, pairs, ctx.p_0, task_p_I(ctx, c), ctx.p_T),
                             pce.tau_fail);
    };
    return run_training(q, arm, objects, opts, fn);
}

TrainResult pretrain_real(QModel& q, const ArmModel& arm, const std::vector<TaskObjectPtr>& objects,
                          const IppTrainOptions& opts)
{
    auto fn = [&](const TaskContext& ctx, std::size_t c, std::uint64_t seed) {
        const auto pairs = candidate_pairs(ctx, c, arm, opts.candidates);
        int tried = 0;
        for (std::size_t i = 0; i < pairs.size() && tried < opts.real_pairs && pairs[i].valid; ++i, ++tried) {
            auto o = plan_pair(arm, ctx, c, pairs[i], mix_seed(seed, i), opts.plan);
            if (o.chain.success) {
                return o.reward;
            }
        }
        return episode_reward(false, 0.0);
    };
    return run_training(q, arm, objects, opts, fn);
}

TrainResult refine(QModel& q, CostNet& pce, std::vector<PceSample>& pce_data, const ArmModel& arm,
                   const std::vector<TaskObjectPtr>& objects, const IppTrainOptions& opts)
{
    auto fn = [&](const TaskContext& ctx, std::size_t c, std::uint64_t seed) {
        const auto pairs = candidate_pairs(ctx, c, arm, opts.candidates);
        const auto est = best_grasp_pair(pce, ctx.g_cur, pairs, ctx.p_0, task_p_I(ctx, c), ctx.p_T);
        if (!est.found) {
            return episode_reward(false, 0.0);
        }
        auto o = plan_pair(arm, ctx, c, est.pair, seed, opts.plan);
        for (std::size_t k = 0; k < o.chain.segments.size(); ++k) {
            const auto& r = o.chain.segments[k];
            pce_data.push_back(PceSample{pce_input(o.segments[k].from, o.segments[k].to), r.cost, r.success});
        }
        return o.reward;
    };
    auto after = [&](long long ep) {
        if (opts.pce_finetune_period > 0 && (ep + 1) % opts.pce_finetune_period == 0 && !pce_data.empty()) {
            train(pce, pce_data, TrainOptions{opts.pce_finetune_epochs, opts.batch, mix_seed(opts.seed, ep)});
        }
    };
    return run_training(q, arm, objects, opts, fn, after);
}

Reward evaluate_real(const QModel* q, const CostNet& pce, const ArmModel& arm, const TaskObjectPtr& object,
                     const Task& task, std::uint64_t seed, const IppTrainOptions& opts)
{
    const TaskContext ctx =
        make_context(object, arm, task_scene(object, task.p_0), home_pose(arm), task.p_0, task.p_T, opts.candidates);
    std::size_t c = ctx.candidates.goal_index;
    if (q) {
        c = greedy_choice(q->q_all(candidate_features(ctx, q->scales)), ctx.candidates.probability);
    }
    const auto pairs = candidate_pairs(ctx, c, arm, opts.candidates);
    const auto est = best_grasp_pair(pce, ctx.g_cur, pairs, ctx.p_0, task_p_I(ctx, c), ctx.p_T);
    if (!est.found) {
        return episode_reward(false, 0.0);
    }
    return plan_pair(arm, ctx, c, est.pair, seed, opts.plan).reward;
}

std::string trace_to_csv(const std::vector<EpisodeRecord>& trace, const std::string& provenance)
{
    std::ostringstream os;
    if (!provenance.empty()) {
        os << "# " << provenance << "\n";
    }
    os << "episode,wall_seconds,reward,success,cost\n";
    for (const auto& r : trace) {
        os << r.episode << ',' << format_double(r.seconds) << ',' << format_double(r.reward.reward) << ','
           << (r.reward.success ? 1 : 0) << ',' << format_double(r.reward.cost) << "\n";
    }
    return os.str();
}

double trailing_mean(const std::vector<EpisodeRecord>& trace, std::size_t window)
{
    if (trace.empty()) {
        return 0.0;
    }
    const std::size_t n = std::min(window, trace.size());
    double s = 0.0;
    for (std::size_t i = trace.size() - n; i < trace.size(); ++i) {
        s += trace[i].reward.reward;
    }
    return s / n;
}

}  // namespace anyplace

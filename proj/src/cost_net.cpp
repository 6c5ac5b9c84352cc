#include "anyplace/cost_net.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>
#include <thread>

#include "mlp_json.hpp"

namespace anyplace {

PceInput pce_input(const Pose& g_i, const Pose& g_j)
{
    const PoseVec6 a = to_vec6(g_i);
    const PoseVec6 b = to_vec6(g_j);
    PceInput x{};
    for (int k = 0; k < 6; ++k) {
        x[k] = a[k];
        x[k + 6] = b[k];
    }
    return x;
}

CostNet CostNet::create(std::uint64_t seed, const std::vector<int>& hidden)
{
    CostNet c;
    std::vector<int> sizes{12};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    c.net = Mlp(sizes);
    std::mt19937_64 rng(seed);
    c.net.init(rng);
    const float pi = static_cast<float>(M_PI);
    c.input_scale = {1.0f, 1.0f, 1.0f, pi, pi, pi, 1.0f, 1.0f, 1.0f, pi, pi, pi};
    return c;
}

Mlp::Vector CostNet::encode(const PceInput& x) const
{
    Mlp::Vector v(12);
    for (int k = 0; k < 12; ++k) {
        v[k] = static_cast<float>(x[k]) / input_scale[k];
    }
    return v;
}

double CostNet::predict(const PceInput& x) const
{
    // a path cost is never negative
    return std::max(0.0, static_cast<double>(net.forward1(encode(x)) * output_scale));
}

std::string CostNet::to_json() const
{
    nlohmann::json j;
    j["format"] = "anyplace-checkpoint";
    j["version"] = 1;
    j["kind"] = "cost_net";
    j["network"] = detail::mlp_to_json(net);
    std::vector<double> scale(input_scale.begin(), input_scale.end());
    j["normalization"] = {{"input_scale", scale}, {"output_scale", static_cast<double>(output_scale)}};
    j["adam"] = detail::adam_to_json(adam);
    j["tau_fail"] = tau_fail;
    return j.dump(1) + "\n";
}

CostNet CostNet::from_json(const std::string& text)
{
    const auto j = detail::parse_checkpoint(text, "cost_net");
    CostNet c;
    c.net = detail::mlp_from_json(j.at("network"));
    if (c.net.inputs() != 12 || c.net.outputs() != 1) {
        throw FormatError("cost_net checkpoint must map 12 inputs to 1 output");
    }
    for (double s : j.at("normalization").at("input_scale").get<std::vector<double>>()) {
        c.input_scale.push_back(static_cast<float>(s));
    }
    if (c.input_scale.size() != 12) {
        throw FormatError("cost_net checkpoint needs 12 input scales");
    }
    c.output_scale = static_cast<float>(j.at("normalization").at("output_scale").get<double>());
    c.adam = detail::adam_from_json(j.at("adam"));
    c.tau_fail = j.at("tau_fail").get<double>();
    return c;
}

void CostNet::save(const std::filesystem::path& path, const std::string& provenance) const
{
    write_file(path, (provenance.empty() ? "" : "// " + provenance + "\n") + to_json());
}

CostNet CostNet::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

Pose random_downward_pose(std::mt19937_64& rng, const PoseBox& box)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 t;
    for (int k = 0; k < 3; ++k) {
        t[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * u(rng);
    }
    const double max_z = box.max_tilt >= M_PI / 2.0 ? 0.0 : -std::cos(box.max_tilt);
    for (;;) {
        Quat q(n(rng), n(rng), n(rng), n(rng));
        if (q.norm() < 1e-9) {
            continue;
        }
        q.normalize();
        if (q.toRotationMatrix()(2, 2) < max_z) {
            return Pose(t, q);
        }
    }
}

std::vector<PceSample> collect_dataset(const ArmModel& arm, const SceneSpec& scene, int count, std::uint64_t seed,
                                       int workers, const PlanOptions& opts, const PoseBox& box)
{
    if (count < 1) {
        throw std::invalid_argument("collect_dataset needs count >= 1");
    }
    std::vector<PceSample> out(static_cast<std::size_t>(count));
    auto run = [&](int w, int stride) {
        for (int i = w; i < count; i += stride) {
            std::mt19937_64 rng(mix_seed(seed, 2 * static_cast<std::uint64_t>(i)));
            const Pose a = random_downward_pose(rng, box);
            const Pose b = random_downward_pose(rng, box);
            const PathResult r = plan(arm, scene, a, b, mix_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1), opts);
            out[i] = PceSample{pce_input(a, b), r.cost, r.success};
        }
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(run, w, workers);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return out;
}

std::string dataset_to_csv(const std::vector<PceSample>& samples, const std::string& provenance)
{
    std::ostringstream os;
    if (!provenance.empty()) {
        os << "# " << provenance << "\n";
    }
    for (int k = 0; k < 12; ++k) {
        os << 'i' << k << ',';
    }
    os << "label,success\n";
    for (const auto& s : samples) {
        for (double v : s.input) {
            os << format_double(v) << ',';
        }
        os << format_double(s.label) << ',' << (s.success ? 1 : 0) << "\n";
    }
    return os.str();
}

std::vector<PceSample> parse_dataset_csv(std::string_view text, const std::string& source)
{
    std::vector<PceSample> out;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        if (!header) {
            if (t.substr(0, 3) != "i0,") {
                throw FormatError(source + ":" + std::to_string(lineno) + ": expected header i0..i11,label,success");
            }
            header = true;
            continue;
        }
        const auto f = split(t, ',');
        if (f.size() != 14) {
            throw FormatError(source + ":" + std::to_string(lineno) + ": expected 14 fields");
        }
        PceSample s;
        try {
            for (int k = 0; k < 12; ++k) {
                s.input[k] = parse_double(f[k]);
            }
            s.label = parse_double(f[12]);
            s.success = parse_int(f[13]) != 0;
        } catch (const FormatError& e) {
            throw FormatError(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(s);
    }
    return out;
}

std::vector<PceSample> load_dataset(const std::filesystem::path& path)
{
    return parse_dataset_csv(read_file(path), path.string());
}

std::vector<double> fit(Mlp& net, Adam& adam, const Mlp::Matrix& x, const Mlp::Vector& y, int epochs, int batch,
                        std::uint64_t seed, Loss loss)
{
    if (x.rows() == 0) {
        throw std::invalid_argument("training data is empty");
    }
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> trace;
    Mlp::Gradients g;
    for (int e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        double sum = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
            const std::size_t n = std::min<std::size_t>(batch, order.size() - start);
            Mlp::Matrix xb(static_cast<Eigen::Index>(n), x.cols());
            Mlp::Vector yb(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                xb.row(static_cast<Eigen::Index>(i)) = x.row(order[start + i]);
                yb(static_cast<Eigen::Index>(i)) = y(order[start + i]);
            }
            const float l = net.loss_and_gradients(xb, yb, loss, g);
            if (!std::isfinite(l)) {
                throw std::runtime_error("non-finite training loss at epoch " + std::to_string(e) + ", step " +
                                         std::to_string(adam.step_count));
            }
            adam.step(net, g);
            sum += l;
            ++batches;
        }
        trace.push_back(sum / batches);
    }
    if (!net.finite()) {
        throw std::runtime_error("training produced non-finite parameters");
    }
    return trace;
}

std::vector<double> train(CostNet& pce, const std::vector<PceSample>& data, const TrainOptions& opts)
{
    Mlp::Matrix x(static_cast<Eigen::Index>(data.size()), 12);
    Mlp::Vector y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = pce.encode(data[i].input).transpose();
        y(static_cast<Eigen::Index>(i)) = static_cast<float>(data[i].label) / pce.output_scale;
    }
    Adam adam(pce.net, pce.adam);
    return fit(pce.net, adam, x, y, opts.epochs, opts.batch, opts.seed, Loss::Mse);
}

PceEvaluation evaluate(const CostNet& pce, const std::vector<PceSample>& test, int timing_calls)
{
    if (test.empty()) {
        throw std::invalid_argument("evaluate needs test samples");
    }
    PceEvaluation ev;
    ev.samples = test.size();
    std::size_t correct = 0;
    double abs_err = 0.0;
    for (const auto& s : test) {
        const double est = pce.predict(s.input);
        const bool pred = pce.feasible(est);
        correct += pred == s.success;
        ev.true_feasible += s.success;
        ev.predicted_feasible += pred;
        abs_err += std::abs(est - s.label);
    }
    ev.classification_rate = static_cast<double>(correct) / test.size();
    ev.mean_abs_error = abs_err / test.size();
    double sink = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < timing_calls; ++i) {
        sink += pce.predict(test[static_cast<std::size_t>(i) % test.size()].input);
    }
    const auto t1 = std::chrono::steady_clock::now();
    ev.mean_inference_seconds = std::chrono::duration<double>(t1 - t0).count() / std::max(1, timing_calls);
    if (!std::isfinite(sink)) {
        throw std::runtime_error("non-finite estimate during timing");
    }
    return ev;
}

}  // namespace anyplace

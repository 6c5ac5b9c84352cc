// anyplace command-line front end. See docs/cli.md for the flag reference.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "anyplace/assets.hpp"
#include "anyplace/bench.hpp"
#include "anyplace/solver.hpp"
#include "anyplace/text_io.hpp"

namespace fs = std::filesystem;
using namespace anyplace;

namespace {

constexpr const char* kVersion = ANYPLACE_VERSION;

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kPlanningFailure = 2;

struct Common {
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    std::string clock = "work";
    std::string arm;
};

std::uint64_t resolve_seed(const Common& c)
{
    if (c.seed_given) {
        return c.seed;
    }
    if (const char* env = std::getenv("ANYPLACE_SEED")) {
        const long long v = parse_int(env);
        if (v < 0) {
            throw FormatError("ANYPLACE_SEED must be non-negative");
        }
        return static_cast<std::uint64_t>(v);
    }
    return 0;
}

// Tool version, subcommand and every flag value (defaults included).
std::string provenance(const CLI::App& app, const CLI::App& sub, std::uint64_t seed)
{
    std::ostringstream os;
    os << "anyplace " << kVersion << ' ' << sub.get_name();
    auto dump = [&](const CLI::App& a) {
        for (const CLI::Option* o : a.get_options()) {
            const std::string name = o->get_single_name();
            if (name.empty() || name == "help" || name == "version" || name == "seed") {
                continue;
            }
            std::string v;
            if (o->count() > 0) {
                for (const auto& r : o->results()) {
                    v += (v.empty() ? "" : ",") + r;
                }
            } else {
                v = o->get_default_str();
            }
            if (o->get_type_size() == 0 && v.empty()) {
                v = o->count() ? "true" : "false";
            }
            os << " --" << name << '=' << v;
        }
    };
    dump(app);
    dump(sub);
    os << " --seed=" << seed;
    return os.str();
}

ArmModel load_arm_or_default(const std::string& path)
{
    if (!path.empty()) {
        return load_arm(path);
    }
    return default_arm();
}

std::vector<std::pair<ObjectModelPtr, fs::path>> load_objects(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw FormatError("not a mesh directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (ext == ".obj" || ext == ".off") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw FormatError("no .obj/.off meshes in " + dir.string());
    }
    std::vector<std::pair<ObjectModelPtr, fs::path>> out;
    for (const auto& f : files) {
        out.emplace_back(load_object_model(f), f);
    }
    return out;
}

std::vector<TaskObjectPtr> task_objects(const fs::path& dir, const ArmModel& arm)
{
    std::vector<ObjectModelPtr> models;
    for (auto& [m, p] : load_objects(dir)) {
        models.push_back(m);
    }
    return make_task_objects(models, arm);
}

void ensure_parent(const fs::path& p)
{
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
}

void write_out(const fs::path& p, const std::string& text)
{
    ensure_parent(p);
    write_file(p, text);
}

std::vector<fs::path> scene_files(const fs::path& p)
{
    if (fs::is_regular_file(p)) {
        return {p};
    }
    if (!fs::is_directory(p)) {
        throw FormatError("no scene file or directory: " + p.string());
    }
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(p)) {
        if (e.path().extension() == ".txt" && e.path().stem().string().rfind("scene", 0) == 0) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) {
        throw FormatError("no scene_*.txt files in " + p.string());
    }
    return out;
}

struct SceneTask {
    std::shared_ptr<ArmModel> arm;
    SolveTask task;
};

SceneTask load_task(const fs::path& scene, const std::string& arm_flag)
{
    SceneFile sf = load_scene(scene);
    SceneTask st;
    if (!arm_flag.empty()) {
        st.arm = std::make_shared<ArmModel>(load_arm(arm_flag));
    } else if (!sf.arm_path.empty()) {
        st.arm = std::make_shared<ArmModel>(load_arm(sf.arm_path));
    } else {
        st.arm = std::make_shared<ArmModel>(default_arm());
    }
    st.task = make_solve_task(*st.arm, sf);
    return st;
}

std::vector<Method> parse_methods(const std::string& s)
{
    std::vector<Method> out;
    for (auto tok : split(s, ',')) {
        out.push_back(parse_method(trim(tok)));
    }
    if (out.empty()) {
        throw FormatError("--methods needs at least one of es, esce, ours");
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"anyplace: learned intermediate object poses for pick-and-place planning"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", kVersion);
    Common common;
    app.add_option("--seed", common.seed, "RNG seed (falls back to $ANYPLACE_SEED, then 0)")
        ->each([&](const std::string&) { common.seed_given = true; });
    app.add_option("--workers", common.workers, "worker threads for collect-pce and bench")
        ->check(CLI::PositiveNumber);
    app.add_option("--clock", common.clock, "time source for budgets and traces")
        ->check(CLI::IsMember({"work", "wall"}));
    app.add_option("--arm", common.arm, "arm model file (default: the built-in arm6)");

    // gen-assets
    auto* gen = app.add_subcommand("gen-assets", "generate meshes, the arm file and benchmark scenes");
    std::string gen_out = "assets";
    SceneGenOptions gen_opts;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--scenes", gen_opts.scene_count, "number of benchmark scenes")->check(CLI::PositiveNumber);
    gen->add_option("--regrasp-scenes", gen_opts.regrasp_scenes, "scenes that need an intermediate pose");
    gen->add_option("--distractors", gen_opts.distractors, "non-target objects per scene");
    gen->add_option("--max-attempts", gen_opts.max_attempts, "placement attempts per scene");

    // collect-pce
    auto* collect = app.add_subcommand("collect-pce", "plan random pose pairs and write a cost dataset");
    std::string collect_out = "data/pce.csv";
    int samples = 10000;
    collect->add_option("--out", collect_out, "dataset CSV");
    collect->add_option("--samples", samples, "number of pose pairs")->check(CLI::PositiveNumber);

    // train-pce
    auto* train_cmd = app.add_subcommand("train-pce", "train the path cost estimator");
    std::string train_data = "data/pce.csv";
    std::string train_out = "models/pce.json";
    std::string loss_out;
    TrainOptions topts;
    int holdout = 2000;
    AdamOptions adam;
    train_cmd->add_option("--data", train_data, "dataset CSV");
    train_cmd->add_option("--out", train_out, "checkpoint");
    train_cmd->add_option("--loss-out", loss_out, "per-epoch loss CSV (optional)");
    train_cmd->add_option("--epochs", topts.epochs)->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch", topts.batch)->check(CLI::PositiveNumber);
    train_cmd->add_option("--holdout", holdout, "trailing samples kept out of training")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--lr", adam.lr);
    train_cmd->add_option("--weight-decay", adam.weight_decay);

    // eval-pce
    auto* eval_cmd = app.add_subcommand("eval-pce", "cost estimator metrics on the held-out samples");
    std::string eval_model = "models/pce.json";
    std::string eval_data = "data/pce.csv";
    std::string eval_out;
    int eval_holdout = 2000;
    int timing_calls = 10000;
    int real_pairs = 200;
    eval_cmd->add_option("--model", eval_model, "checkpoint");
    eval_cmd->add_option("--data", eval_data, "dataset CSV");
    eval_cmd->add_option("--holdout", eval_holdout, "trailing samples evaluated (0 = all)")
        ->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--timing-calls", timing_calls, "forward calls timed")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--real-pairs", real_pairs, "held-out pairs re-planned for the timing comparison")
        ->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--out", eval_out, "metrics CSV (optional)");

    // pretrain-ipp
    auto* pre = app.add_subcommand("pretrain-ipp", "train the intermediate pose planner");
    std::string pre_pce = "models/pce.json";
    std::string pre_objects = "assets/meshes/train";
    std::string pre_out = "models/ipp.json";
    std::string pre_trace = "out/pretrain_trace.csv";
    bool no_pce = false;
    IppTrainOptions popts;
    pre->add_option("--pce", pre_pce, "cost estimator checkpoint");
    pre->add_option("--objects", pre_objects, "training mesh directory");
    pre->add_option("--out", pre_out, "Q model checkpoint");
    pre->add_option("--trace", pre_trace, "reward trace CSV");
    pre->add_flag("--no-pce", no_pce, "rewards from real planned chains instead of the estimator");
    pre->add_option("--episodes", popts.episodes)->check(CLI::PositiveNumber);
    pre->add_option("--eps-start", popts.eps_start);
    pre->add_option("--eps-end", popts.eps_end);
    pre->add_option("--batch", popts.batch)->check(CLI::PositiveNumber);
    pre->add_option("--stop-window", popts.stop_window, "trailing window for early stop (0 = off)");
    pre->add_option("--stop-reward", popts.stop_reward, "stop once the trailing mean reaches this");
    pre->add_option("--time-limit", popts.time_limit, "seconds on the clock (0 = off)");

    // refine
    auto* ref = app.add_subcommand("refine", "fine-tune planner and estimator on real planning results");
    std::string ref_pce = "models/pce.json";
    std::string ref_ipp = "models/ipp.json";
    std::string ref_data;
    std::string ref_objects = "assets/meshes/train";
    std::string ref_out_ipp = "models/ipp_refined.json";
    std::string ref_out_pce = "models/pce_refined.json";
    std::string ref_trace = "out/refine_trace.csv";
    IppTrainOptions ropts;
    ropts.episodes = 1000;
    ropts.eps_start = 0.1;
    ref->add_option("--pce", ref_pce, "cost estimator checkpoint");
    ref->add_option("--ipp", ref_ipp, "Q model checkpoint");
    ref->add_option("--data", ref_data, "initial estimator dataset (optional)");
    ref->add_option("--objects", ref_objects, "training mesh directory");
    ref->add_option("--out-ipp", ref_out_ipp);
    ref->add_option("--out-pce", ref_out_pce);
    ref->add_option("--trace", ref_trace, "reward trace CSV");
    ref->add_option("--episodes", ropts.episodes)->check(CLI::PositiveNumber);
    ref->add_option("--eps-start", ropts.eps_start);
    ref->add_option("--eps-end", ropts.eps_end);
    ref->add_option("--finetune-period", ropts.pce_finetune_period);
    ref->add_option("--finetune-epochs", ropts.pce_finetune_epochs);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "one method on one scene");
    std::string solve_scene;
    std::string solve_method = "ours";
    std::string solve_pce = "models/pce.json";
    std::string solve_ipp = "models/ipp.json";
    std::string solve_out = "out/solve_trace.csv";
    std::string solve_path_out;
    double solve_budget = -1.0;
    bool no_prune = false;
    bool goal_only = false;
    solve_cmd->add_option("--scene", solve_scene, "scene file")->required();
    solve_cmd->add_option("--method", solve_method)->check(CLI::IsMember({"es", "esce", "ours"}));
    solve_cmd->add_option("--pce", solve_pce, "cost estimator checkpoint (esce, ours)");
    solve_cmd->add_option("--ipp", solve_ipp, "Q model checkpoint (ours)");
    solve_cmd->add_option("--budget", solve_budget, "seconds; <0: 60 (es: unlimited), 0: unlimited");
    solve_cmd->add_option("--out", solve_out, "trace CSV");
    solve_cmd->add_option("--path-out", solve_path_out, "joint waypoints of the best chain (optional)");
    solve_cmd->add_flag("--no-prune", no_prune, "plan every chain to the end");
    solve_cmd->add_flag("--goal-only", goal_only, "direct manipulation only");

    // bench
    auto* bench = app.add_subcommand("bench", "method x scene x seed grid");
    std::string bench_scenes = "assets/scenes";
    std::string bench_methods = "es,esce,ours";
    std::string bench_pce = "models/pce.json";
    std::string bench_ipp = "models/ipp.json";
    std::string bench_out = "out/bench";
    int bench_seeds = 5;
    double bench_budget = 60.0;
    int curve_points = 101;
    bench->add_option("--scenes", bench_scenes, "scene directory or file");
    bench->add_option("--methods", bench_methods, "comma-separated subset of es,esce,ours");
    bench->add_option("--pce", bench_pce);
    bench->add_option("--ipp", bench_ipp);
    bench->add_option("--out", bench_out, "output directory");
    bench->add_option("--seeds", bench_seeds, "seeds seed..seed+n-1")->check(CLI::PositiveNumber);
    bench->add_option("--budget", bench_budget, "seconds per run for esce and ours (es exhausts)");
    bench->add_option("--curve-points", curve_points, "time samples of the reciprocal-cost curve")
        ->check(CLI::Range(2, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        const std::uint64_t seed = resolve_seed(common);
        const ClockKind clock = parse_clock_kind(common.clock);
        const CLI::App* sub = app.get_subcommands().front();
        const std::string prov = provenance(app, *sub, seed);

        if (*gen) {
            const fs::path out(gen_out);
            const ArmModel arm = load_arm_or_default(common.arm);
            write_out(out / "arm6.txt", "# " + prov + "\n" + to_text(arm));
            std::vector<std::pair<ObjectModelPtr, fs::path>> targets;
            std::vector<std::pair<ObjectModelPtr, fs::path>> distractors;
            for (auto& nm : generate_meshes(seed)) {
                const fs::path rel = fs::path("meshes") / nm.split / (nm.name + ".obj");
                write_out(out / rel, to_obj(nm.mesh, prov));
                auto model = make_object_model(nm.mesh, nm.name, out / rel);
                (nm.split == "test" ? targets : distractors).emplace_back(model, fs::path("..") / rel);
            }
            gen_opts.check.clock = ClockKind::Work;
            gen_opts.check.seed = seed;
            std::ostringstream manifest;
            manifest << "# " << prov << "\n" << "scene,target,needs_intermediate,attempts\n";
            auto report = [&](const GeneratedScene& g, int attempts) {
                std::cerr << g.file.name << ": " << (g.needs_intermediate ? "regrasp" : "direct") << " after "
                          << attempts << " attempt(s)\n";
                manifest << g.file.name << ',' << g.file.mesh_paths.front().generic_string() << ','
                         << (g.needs_intermediate ? 1 : 0) << ',' << attempts << "\n";
            };
            const auto scenes = generate_scenes(arm, targets, distractors, seed, gen_opts, report);
            for (const auto& g : scenes) {
                SceneFile f = g.file;
                f.arm_path = out / "arm6.txt";
                write_out(out / "scenes" / (f.name + ".txt"), "# " + prov + "\n" + to_text(f, out / "scenes"));
            }
            write_out(out / "scenes" / "manifest.csv", manifest.str());
            std::cout << "wrote " << targets.size() + distractors.size() << " meshes and " << scenes.size()
                      << " scenes to " << out.string() << "\n";
            return kOk;
        }

        if (*collect) {
            const ArmModel arm = load_arm_or_default(common.arm);
            const auto t0 = std::chrono::steady_clock::now();
            const auto data = collect_dataset(arm, SceneSpec{}, samples, seed, common.workers);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            write_out(collect_out, dataset_to_csv(data, prov));
            const auto ok = std::count_if(data.begin(), data.end(), [](const PceSample& s) { return s.success; });
            std::cout << "samples " << data.size() << ", feasible " << ok << ", " << secs << " s\n";
            return kOk;
        }

        if (*train_cmd) {
            auto data = load_dataset(train_data);
            if (static_cast<std::size_t>(holdout) >= data.size()) {
                throw FormatError("--holdout leaves no training samples");
            }
            data.resize(data.size() - holdout);
            CostNet pce = CostNet::create(seed);
            pce.adam = adam;
            topts.seed = seed;
            const auto loss = train(pce, data, topts);
            pce.save(train_out, prov);
            if (!loss_out.empty()) {
                std::ostringstream os;
                os << "# " << prov << "\nepoch,loss\n";
                for (std::size_t i = 0; i < loss.size(); ++i) {
                    os << i << ',' << format_double(loss[i]) << "\n";
                }
                write_out(loss_out, os.str());
            }
            std::cout << "trained on " << data.size() << " samples, final loss " << loss.back() << "\n";
            return kOk;
        }

        if (*eval_cmd) {
            const CostNet pce = CostNet::load(eval_model);
            auto data = load_dataset(eval_data);
            if (eval_holdout > 0 && static_cast<std::size_t>(eval_holdout) < data.size()) {
                data.erase(data.begin(), data.end() - eval_holdout);
            }
            const auto ev = evaluate(pce, data, timing_calls);
            const ArmModel arm = load_arm_or_default(common.arm);
            const std::size_t n = std::min<std::size_t>(real_pairs, data.size());
            double real = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                PoseVec6 a;
                PoseVec6 b;
                for (int k = 0; k < 6; ++k) {
                    a[k] = data[i].input[k];
                    b[k] = data[i].input[k + 6];
                }
                const auto t0 = std::chrono::steady_clock::now();
                (void)plan(arm, SceneSpec{}, from_vec6(a), from_vec6(b), mix_seed(seed, i));
                real += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
            const double real_ms = n ? 1e3 * real / n : std::nan("");
            std::ostringstream os;
            os << "success_rate,avg_error,inference_ms,real_planning_ms\n"
               << format_double(100.0 * ev.classification_rate) << ',' << format_double(ev.mean_abs_error) << ','
               << format_double(1e3 * ev.mean_inference_seconds) << ',' << format_double(real_ms) << "\n";
            std::cout << os.str();
            if (!eval_out.empty()) {
                write_out(eval_out, "# " + prov + "\n" + os.str());
            }
            return kOk;
        }

        if (*pre) {
            const ArmModel arm = load_arm_or_default(common.arm);
            const auto objects = task_objects(pre_objects, arm);
            popts.seed = seed;
            popts.clock = clock;
            QModel q = QModel::create(seed);
            TrainResult res;
            if (no_pce) {
                res = pretrain_real(q, arm, objects, popts);
            } else {
                const CostNet pce = CostNet::load(pre_pce);
                res = pretrain(q, pce, arm, objects, popts);
            }
            q.save(pre_out, prov);
            write_out(pre_trace, trace_to_csv(res.trace, prov));
            std::uint64_t calls = 0;
            for (const auto& r : res.trace) {
                calls += r.plan_calls;
            }
            std::cout << "episodes " << res.trace.size() << ", trailing-500 reward " << trailing_mean(res.trace, 500)
                      << ", plan calls " << calls << ", clock " << res.trace.back().seconds << " s\n";
            return kOk;
        }

        if (*ref) {
            const ArmModel arm = load_arm_or_default(common.arm);
            const auto objects = task_objects(ref_objects, arm);
            ropts.seed = seed;
            ropts.clock = clock;
            QModel q = QModel::load(ref_ipp);
            CostNet pce = CostNet::load(ref_pce);
            std::vector<PceSample> data;
            if (!ref_data.empty()) {
                data = load_dataset(ref_data);
            }
            const auto res = refine(q, pce, data, arm, objects, ropts);
            q.save(ref_out_ipp, prov);
            pce.save(ref_out_pce, prov);
            write_out(ref_trace, trace_to_csv(res.trace, prov));
            std::cout << "episodes " << res.trace.size() << ", trailing-500 reward " << trailing_mean(res.trace, 500)
                      << "\n";
            return kOk;
        }

        if (*solve_cmd) {
            const Method method = parse_method(solve_method);
            const SceneTask st = load_task(solve_scene, common.arm);
            SolveOptions o;
            o.seed = seed;
            o.clock = clock;
            o.prune = !no_prune;
            o.goal_only = goal_only;
            o.budget = solve_budget < 0.0 ? (method == Method::Es ? 0.0 : 60.0) : solve_budget;
            std::optional<CostNet> pce;
            std::optional<QModel> q;
            if (method != Method::Es) {
                pce = CostNet::load(solve_pce);
            }
            if (method == Method::Ours) {
                q = QModel::load(solve_ipp);
            }
            const auto tr = solve(method, st.task, o, pce ? &*pce : nullptr, q ? &*q : nullptr);
            write_out(solve_out, trace_to_csv(tr, prov));
            if (!solve_path_out.empty() && tr.success()) {
                std::ostringstream os;
                os << "# " << prov << "\n";
                for (std::size_t k = 0; k < tr.best.chain.size(); ++k) {
                    os << "# segment " << k << "\n" << path_to_text(tr.best.chain[k].waypoints);
                }
                write_out(solve_path_out, os.str());
            }
            std::cout << st.task.name << ' ' << method_name(method) << ": ";
            if (!tr.success()) {
                std::cout << "no solution (" << tr.evaluated << " of " << tr.combinations << " combinations, "
                          << tr.elapsed << " s)\n";
                return kPlanningFailure;
            }
            std::cout << "cost " << tr.best.total_cost << ", " << (tr.best.direct ? "direct" : "via intermediate")
                      << ", first at " << tr.time_to_first << " s, " << tr.points.size() << " improvement(s), "
                      << tr.elapsed << " s\n";
            return kOk;
        }

        if (*bench) {
            const auto methods = parse_methods(bench_methods);
            std::vector<SceneTask> loaded;
            std::vector<SolveTask> tasks;
            for (const auto& f : scene_files(bench_scenes)) {
                loaded.push_back(load_task(f, common.arm));
                tasks.push_back(loaded.back().task);
            }
            std::optional<CostNet> pce;
            std::optional<QModel> q;
            const bool learned = std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::Es; });
            if (learned) {
                pce = CostNet::load(bench_pce);
            }
            if (std::find(methods.begin(), methods.end(), Method::Ours) != methods.end()) {
                q = QModel::load(bench_ipp);
            }
            std::vector<std::uint64_t> seeds;
            for (int i = 0; i < bench_seeds; ++i) {
                seeds.push_back(seed + static_cast<std::uint64_t>(i));
            }
            // ES exhausts; the budget applies to the learned methods.
            std::vector<BenchRun> runs;
            SolveOptions o;
            o.clock = clock;
            for (Method m : methods) {
                o.budget = m == Method::Es ? 0.0 : bench_budget;
                auto part = run_bench(tasks, {m}, seeds, o, pce ? &*pce : nullptr, q ? &*q : nullptr, common.workers);
                runs.insert(runs.end(), part.begin(), part.end());
            }
            const fs::path out(bench_out);
            std::ostringstream runs_csv;
            runs_csv << "# " << prov << "\n"
                     << "scene,method,seed,success,time_to_first,total_cost,elapsed,evaluated,combinations,plans\n";
            for (const auto& r : runs) {
                const auto& tr = r.trace;
                const std::string base = tasks[r.scene].name + "_" + method_name(r.method) + "_" + std::to_string(r.seed);
                write_out(out / "traces" / (base + ".csv"), trace_to_csv(tr, prov));
                runs_csv << tasks[r.scene].name << ',' << method_name(r.method) << ',' << r.seed << ','
                         << (tr.success() ? 1 : 0) << ',' << format_double(tr.time_to_first) << ','
                         << format_double(tr.best.total_cost) << ',' << format_double(tr.elapsed) << ','
                         << tr.evaluated << ',' << tr.combinations << ',' << tr.plans << "\n";
            }
            write_out(out / "runs.csv", runs_csv.str());
            const auto summary = summarize(runs, methods);
            write_out(out / "summary.csv", summary_csv(summary, prov));
            // Without a budget the curve spans the longest run.
            double span = bench_budget;
            if (span <= 0.0) {
                for (const auto& r : runs) {
                    span = std::max(span, r.trace.elapsed);
                }
            }
            std::vector<double> times;
            for (int i = 0; i < curve_points; ++i) {
                times.push_back(span * i / (curve_points - 1));
            }
            write_out(out / "curves.csv", curves_csv(runs, methods, times, prov));
            std::cout << summary_csv(summary);
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "anyplace: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

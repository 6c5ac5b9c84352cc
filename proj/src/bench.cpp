#include "anyplace/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "anyplace/text_io.hpp"

namespace anyplace {

std::vector<BenchRun> run_bench(const std::vector<SolveTask>& tasks, const std::vector<Method>& methods,
                                const std::vector<std::uint64_t>& seeds, const SolveOptions& base,
                                const CostNet* pce, const QModel* q, int workers)
{
    std::vector<BenchRun> runs;
    for (std::size_t s = 0; s < tasks.size(); ++s) {
        for (Method m : methods) {
            for (std::uint64_t seed : seeds) {
                runs.push_back(BenchRun{s, m, seed, {}});
            }
        }
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            BenchRun& r = runs[i];
            SolveOptions o = base;
            o.seed = mix_seed(r.seed, r.scene);
            r.trace = solve(r.method, tasks[r.scene], o, pce, q);
        }
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return runs;
}

std::vector<MethodSummary> summarize(const std::vector<BenchRun>& runs, const std::vector<Method>& methods)
{
    std::vector<MethodSummary> out;
    for (Method m : methods) {
        MethodSummary s;
        s.method = m;
        std::vector<double> ttf;
        double cost = 0.0;
        for (const auto& r : runs) {
            if (r.method != m) {
                continue;
            }
            ++s.runs;
            if (r.trace.success()) {
                ttf.push_back(r.trace.time_to_first);
                cost += r.trace.best.total_cost;
            }
        }
        const double nan = std::nan("");
        s.success_rate = s.runs ? static_cast<double>(ttf.size()) / s.runs : 0.0;
        s.mean_total_cost = ttf.empty() ? nan : cost / ttf.size();
        double sum = 0.0;
        for (double t : ttf) {
            sum += t;
        }
        s.mean_time_to_first = ttf.empty() ? nan : sum / ttf.size();
        if (ttf.empty()) {
            s.median_time_to_first = nan;
        } else {
            std::sort(ttf.begin(), ttf.end());
            const std::size_t n = ttf.size();
            s.median_time_to_first = n % 2 ? ttf[n / 2] : 0.5 * (ttf[n / 2 - 1] + ttf[n / 2]);
        }
        out.push_back(s);
    }
    return out;
}

std::string summary_csv(const std::vector<MethodSummary>& rows, const std::string& provenance)
{
    std::ostringstream os;
    if (!provenance.empty()) {
        os << "# " << provenance << "\n";
    }
    os << "method,success_pct,mean_time_to_first,mean_total_cost\n";
    for (const auto& r : rows) {
        os << method_name(r.method) << ',' << format_double(100.0 * r.success_rate) << ','
           << format_double(r.mean_time_to_first) << ',' << format_double(r.mean_total_cost) << "\n";
    }
    return os.str();
}

std::vector<CurvePoint> reciprocal_curve(const std::vector<BenchRun>& runs, Method method,
                                         const std::vector<double>& times)
{
    std::vector<CurvePoint> out;
    for (double t : times) {
        double sum = 0.0;
        double sq = 0.0;
        std::size_t n = 0;
        for (const auto& r : runs) {
            if (r.method != method) {
                continue;
            }
            const double c = r.trace.best_at(t);
            const double v = std::isfinite(c) && c > 0.0 ? 1.0 / c : 0.0;
            sum += v;
            sq += v * v;
            ++n;
        }
        CurvePoint p;
        p.t = t;
        if (n > 0) {
            p.mean = sum / n;
            p.stddev = std::sqrt(std::max(0.0, sq / n - p.mean * p.mean));
        }
        out.push_back(p);
    }
    return out;
}

std::string curves_csv(const std::vector<BenchRun>& runs, const std::vector<Method>& methods,
                       const std::vector<double>& times, const std::string& provenance)
{
    std::ostringstream os;
    if (!provenance.empty()) {
        os << "# " << provenance << "\n";
    }
    os << "method,t_seconds,mean_reciprocal_cost,std_reciprocal_cost\n";
    for (Method m : methods) {
        for (const auto& p : reciprocal_curve(runs, m, times)) {
            os << method_name(m) << ',' << format_double(p.t) << ',' << format_double(p.mean) << ','
               << format_double(p.stddev) << "\n";
        }
    }
    return os.str();
}

}  // namespace anyplace

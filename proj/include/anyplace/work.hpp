#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string_view>

namespace anyplace {

/// Per-thread operation counters. Every expensive primitive charges itself
/// here; the work clock turns the counts into nominal seconds so budgets and
/// traces are reproducible bit-for-bit regardless of machine load.
namespace work {

enum class Op : int {
    Fk = 0,        ///< one forward-kinematics evaluation
    Narrowphase,   ///< one GJK / exact distance query
    Broadphase,    ///< one bounding-sphere rejection test
    MlpMac,        ///< one multiply-accumulate in a dense layer
    PlanCall,      ///< one path_planner::plan invocation (counted, not timed)
    kCount
};

struct Counters {
    std::array<std::uint64_t, static_cast<int>(Op::kCount)> n{};

    std::uint64_t operator[](Op op) const { return n[static_cast<int>(op)]; }
    Counters operator-(const Counters& o) const
    {
        Counters d;
        for (std::size_t i = 0; i < n.size(); ++i) {
            d.n[i] = n[i] - o.n[i];
        }
        return d;
    }
};

Counters& local();

inline void charge(Op op, std::uint64_t k = 1) { local().n[static_cast<int>(op)] += k; }

/// Nominal seconds per operation, calibrated on a desktop CPU.
double nominal_seconds(const Counters& c);

}  // namespace work

class Clock {
public:
    virtual ~Clock() = default;
    /// Seconds since construction or the last restart().
    virtual double elapsed() const = 0;
    virtual void restart() = 0;
};

class WallClock final : public Clock {
public:
    WallClock() { restart(); }
    double elapsed() const override
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    void restart() override { start_ = std::chrono::steady_clock::now(); }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Deterministic clock driven by the calling thread's work counters.
class WorkClock final : public Clock {
public:
    WorkClock() { restart(); }
    double elapsed() const override { return work::nominal_seconds(work::local() - start_); }
    void restart() override { start_ = work::local(); }

private:
    work::Counters start_;
};

enum class ClockKind { Work, Wall };

ClockKind parse_clock_kind(std::string_view s);
std::unique_ptr<Clock> make_clock(ClockKind kind);

}  // namespace anyplace

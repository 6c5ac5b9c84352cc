#include "anyplace/work.hpp"

#include <string>

#include "anyplace/text_io.hpp"

namespace anyplace {

namespace work {

Counters& local()
{
    thread_local Counters counters;
    return counters;
}

double nominal_seconds(const Counters& c)
{
    // Least-squares fit of wall time against the counters over a few
    // hundred plans and 2e5 cost-net forwards on a 2020s desktop core. The
    // Fk rate absorbs the per-configuration collision bookkeeping.
    constexpr double kFk = 4.3e-7;
    constexpr double kNarrow = 4.0e-7;
    constexpr double kBroad = 2.4e-8;
    constexpr double kMac = 2.4e-10;
    return kFk * static_cast<double>(c[Op::Fk]) + kNarrow * static_cast<double>(c[Op::Narrowphase]) +
           kBroad * static_cast<double>(c[Op::Broadphase]) + kMac * static_cast<double>(c[Op::MlpMac]);
}

}  // namespace work

ClockKind parse_clock_kind(std::string_view s)
{
    if (s == "work") {
        return ClockKind::Work;
    }
    if (s == "wall") {
        return ClockKind::Wall;
    }
    throw FormatError("unknown clock '" + std::string(s) + "' (expected work or wall)");
}

std::unique_ptr<Clock> make_clock(ClockKind kind)
{
    if (kind == ClockKind::Wall) {
        return std::make_unique<WallClock>();
    }
    return std::make_unique<WorkClock>();
}

}  // namespace anyplace

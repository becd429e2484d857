#ifndef RAILWARN_STATS_HPP
#define RAILWARN_STATS_HPP

#include "railwarn/packet_log.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace railwarn::sim {

inline constexpr double kDefaultBinWidthM = 50.0;
inline constexpr double kCoveragePdrThreshold = 0.9;

class StatsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Packets whose tx-rx distance falls in [lower_m, upper_m).
struct DistanceBin {
    long index = 0;
    double lower_m = 0.0;
    double upper_m = 0.0;
    std::size_t packets = 0;
    std::size_t received = 0;
    double pdr = 0.0;

    bool operator==(const DistanceBin&) const = default;
};

struct DeliveryStats {
    std::size_t packets = 0;
    std::size_t received = 0;
    double pdr = 0.0;
    std::vector<DistanceBin> bins; // non-empty bins, ascending index
    /// Farthest received distance d whose window (d - bin width, d] has
    /// PDR >= 0.9; 0 if none.
    double coverage_range_m = 0.0;

    bool operator==(const DeliveryStats&) const = default;

    /// Bin with the given index, if any packets fell in it.
    const DistanceBin* bin(long index) const noexcept;
};

struct ReceiverStats {
    std::string id;
    ReceiverRole role = ReceiverRole::Obu;
    bool distance_known = false;
    /// Final outcome, direct or via relay.
    DeliveryStats delivery;
    /// Direct path only; OBUs of logs with known relay paths.
    std::optional<DeliveryStats> direct_only;
};

struct Stats {
    double bin_width_m = kDefaultBinWidthM;
    std::size_t packets = 0;
    std::vector<ReceiverStats> receivers;

    const ReceiverStats* receiver(const std::string& id) const noexcept;
};

/// Per-receiver PDR, overall and by distance bin. Throws
/// StatsError("no packets to analyze") on an empty log.
Stats compute_stats(const SimLog& log, double bin_width_m = kDefaultBinWidthM);

} // namespace railwarn::sim

#endif // RAILWARN_STATS_HPP

#include "railwarn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace railwarn::sim {

namespace {

struct Accumulator {
    std::size_t packets = 0;
    std::size_t received = 0;
    std::map<long, DistanceBin> bins;
    std::vector<std::pair<double, bool>> samples; // (distance, received)

    void add(bool ok, std::optional<double> distance, double width) {
        ++packets;
        received += ok ? 1 : 0;
        if (!distance)
            return;
        const long idx = static_cast<long>(std::floor(*distance / width));
        auto& b = bins[idx];
        b.index = idx;
        b.lower_m = static_cast<double>(idx) * width;
        b.upper_m = static_cast<double>(idx + 1) * width;
        ++b.packets;
        b.received += ok ? 1 : 0;
        samples.emplace_back(*distance, ok);
    }

    // Farthest received distance d whose trailing window (d - width, d]
    // still delivers at least the coverage PDR. Unlike fixed bins this does
    // not snap the edge to a bin boundary.
    double coverage_range(double width) const {
        auto sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> prefix(sorted.size() + 1, 0);
        for (std::size_t i = 0; i < sorted.size(); ++i)
            prefix[i + 1] = prefix[i] + (sorted[i].second ? 1 : 0);
        auto below = [&](double d) {
            return static_cast<std::size_t>(
                std::upper_bound(sorted.begin(), sorted.end(), d,
                                 [](double v, const std::pair<double, bool>& s) { return v < s.first; }) -
                sorted.begin());
        };
        double best = 0.0;
        for (const auto& [d, ok] : sorted) {
            if (!ok || d <= best)
                continue;
            const std::size_t hi = below(d);
            const std::size_t lo = below(d - width);
            const double pdr = static_cast<double>(prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
            if (pdr >= kCoveragePdrThreshold)
                best = d;
        }
        return best;
    }

    DeliveryStats finish(double width) const {
        DeliveryStats s;
        s.packets = packets;
        s.received = received;
        s.pdr = packets ? static_cast<double>(received) / static_cast<double>(packets) : 0.0;
        for (auto [idx, b] : bins) {
            b.pdr = static_cast<double>(b.received) / static_cast<double>(b.packets);
            s.bins.push_back(b);
        }
        s.coverage_range_m = coverage_range(width);
        return s;
    }
};

} // namespace

const DistanceBin* DeliveryStats::bin(long index) const noexcept {
    auto it = std::find_if(bins.begin(), bins.end(), [&](const DistanceBin& b) { return b.index == index; });
    return it == bins.end() ? nullptr : &*it;
}

const ReceiverStats* Stats::receiver(const std::string& id) const noexcept {
    auto it = std::find_if(receivers.begin(), receivers.end(), [&](const ReceiverStats& r) { return r.id == id; });
    return it == receivers.end() ? nullptr : &*it;
}

Stats compute_stats(const SimLog& log, double bin_width_m) {
    if (log.fates.empty())
        throw StatsError("no packets to analyze");
    if (!(bin_width_m > 0.0))
        throw StatsError("bin width must be > 0");

    Stats out;
    out.bin_width_m = bin_width_m;
    out.packets = log.fates.size();
    for (std::size_t r = 0; r < log.receivers.size(); ++r) {
        const auto& info = log.receivers[r];
        const bool track_direct = log.relay_path_known && info.role == ReceiverRole::Obu;
        Accumulator final_acc, direct_acc;
        bool distance_known = true;
        for (const auto& fate : log.fates) {
            const Reception& rec = fate.receptions.at(r);
            distance_known = distance_known && rec.distance_m.has_value();
            final_acc.add(rec.received, rec.distance_m, bin_width_m);
            if (track_direct)
                direct_acc.add(rec.received_direct(), rec.distance_m, bin_width_m);
        }
        ReceiverStats rs;
        rs.id = info.id;
        rs.role = info.role;
        rs.distance_known = distance_known;
        rs.delivery = final_acc.finish(bin_width_m);
        if (track_direct)
            rs.direct_only = direct_acc.finish(bin_width_m);
        out.receivers.push_back(std::move(rs));
    }
    return out;
}

} // namespace railwarn::sim

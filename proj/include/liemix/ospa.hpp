#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liemix/lie_group.hpp"

namespace liemix {

enum class BaseDistance {
    PoseLogNorm,   // ||log(X Y^-1)||_2
    PositionOnly,  // Euclidean distance of the translation parts
};

struct OspaConfig {
    double cutoff = 10.0;
    double order = 1.0;
    BaseDistance base_distance = BaseDistance::PoseLogNorm;

    void validate() const;
};

std::string to_string(BaseDistance b);
BaseDistance parse_base_distance(std::string_view s);

struct OspaResult {
    double total = 0.0;
    double localization = 0.0;
    double cardinality = 0.0;
};

/// Base distance between two elements (before cut-off).
double base_distance(const GroupElement& x, const GroupElement& y, BaseDistance kind);

/// OSPA distance between finite sets, with its localization and
/// cardinality components; the optimal assignment is found exactly.
OspaResult ospa(const std::vector<GroupElement>& estimates, const std::vector<GroupElement>& truths,
                const OspaConfig& cfg);

/// Component-wise mean of a nonempty series (per-step values of one run, or
/// per-run cumulative values across scenarios).
OspaResult accumulate(std::span<const OspaResult> series);

}  // namespace liemix

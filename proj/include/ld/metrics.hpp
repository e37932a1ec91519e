#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ld/core.hpp"
#include "ld/graph.hpp"
#include "ld/labelops.hpp"

namespace ld {

struct MetricsRecord {
    std::string name;
    double value = 0.0;
    std::string split;
    std::uint64_t seed = 0;
};

/// Fraction of masked rows where argmax(pred) equals argmax(y); argmax ties
/// break toward the lowest index. Multi-class only; throws on an empty mask.
MetricsRecord accuracy(const Matrix& pred, const LabelMatrix& y, std::span<const NodeId> mask);

/// Per-label ROC-AUC by rank statistic with ties counting 0.5, averaged over
/// labels. Labels with no positive or no negative in the mask are excluded
/// with a warning on stderr; throws when every label is degenerate.
MetricsRecord roc_auc(const Matrix& scores, const LabelMatrix& y, std::span<const NodeId> mask);

}  // namespace ld

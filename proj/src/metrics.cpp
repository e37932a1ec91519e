#include "ld/metrics.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <vector>

namespace ld {

MetricsRecord accuracy(const Matrix& pred, const LabelMatrix& y, std::span<const NodeId> mask) {
    if (y.task != TaskKind::MultiClass) throw Error("accuracy: multi-class task required");
    if (!pred.same_shape(y.values)) throw Error("accuracy: shape mismatch");
    if (mask.empty()) throw Error("accuracy: empty mask");
    std::size_t hits = 0;
    for (NodeId r : mask) {
        std::size_t pbest = 0, ybest = 0;
        for (std::size_t j = 1; j < pred.cols; ++j) {
            if (pred.at(r, j) > pred.at(r, pbest)) pbest = j;
            if (y.values.at(r, j) > y.values.at(r, ybest)) ybest = j;
        }
        if (pbest == ybest) ++hits;
    }
    return MetricsRecord{"accuracy", static_cast<double>(hits) / static_cast<double>(mask.size()),
                         "", 0};
}

MetricsRecord roc_auc(const Matrix& scores, const LabelMatrix& y, std::span<const NodeId> mask) {
    if (y.task != TaskKind::MultiLabelBinary)
        throw Error("roc_auc: multi-label binary task required");
    if (!scores.same_shape(y.values)) throw Error("roc_auc: shape mismatch");
    if (mask.empty()) throw Error("roc_auc: empty mask");

    double auc_sum = 0.0;
    std::size_t used = 0;
    std::vector<std::pair<double, bool>> entries(mask.size());
    for (std::size_t label = 0; label < scores.cols; ++label) {
        std::size_t positives = 0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            const bool pos = y.values.at(mask[i], label) > 0.5;
            entries[i] = {scores.at(mask[i], label), pos};
            positives += pos ? 1 : 0;
        }
        const std::size_t negatives = mask.size() - positives;
        if (positives == 0 || negatives == 0) {
            std::cerr << "roc_auc: label " << label << " is degenerate in this mask, skipping\n";
            continue;
        }
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        // Midranks: tied scores share the average rank, which yields the 0.5
        // tie convention of the pairwise statistic.
        double pos_rank_sum = 0.0;
        std::size_t i = 0;
        while (i < entries.size()) {
            std::size_t j = i;
            while (j < entries.size() && entries[j].first == entries[i].first) ++j;
            const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
            for (std::size_t k = i; k < j; ++k)
                if (entries[k].second) pos_rank_sum += midrank;
            i = j;
        }
        const double p = static_cast<double>(positives);
        const double auc = (pos_rank_sum - p * (p + 1.0) / 2.0) /
                           (p * static_cast<double>(negatives));
        auc_sum += auc;
        ++used;
    }
    if (used == 0) throw Error("roc_auc: every label is degenerate in this mask");
    return MetricsRecord{"roc_auc", auc_sum / static_cast<double>(used), "", 0};
}

}  // namespace ld

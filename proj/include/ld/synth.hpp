#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ld/graph.hpp"
#include "ld/labelops.hpp"
#include "ld/nn.hpp"

namespace ld {

/// Configuration of the generative model Y = phi(A_hat) psi*(F*).
struct SynthConfig {
    std::size_t num_nodes = 200;
    std::size_t attr_dim = 8;
    std::size_t num_classes = 3;
    std::vector<double> alpha_star;         // empty: sample a well-conditioned filter
    std::size_t filter_hops = 2;            // N* when alpha_star is sampled
    std::vector<std::size_t> psi_hidden;    // hidden sizes of psi*; empty = linear
    std::size_t component_size = 8;         // regular-component size of the graph model
    double noise_edge_fraction = 0.05;      // extra random edges as a fraction of n
    std::size_t planted_duplicates = 0;     // attribute rows copied onto other nodes
    double train_frac = 1.0;
    double val_frac = 0.0;
    std::uint64_t seed = 0;
    std::size_t max_regen = 32;             // filter resampling attempts
};

struct GeneratedDataset {
    std::string name;
    CsrGraph graph;
    Matrix attrs;
    Matrix targets;     // continuous targets phi(A_hat) psi*(F*)
    LabelMatrix labels; // argmax-discretized one-hot labels
    NodeSplit split;
    // Generator ground truth (empty for loaded bundles).
    std::vector<double> alpha_star;
    Mlp psi_star;
    Matrix fstar;
    std::string provenance;  // JSON string describing how the data was made
};

/// The 4-node, two-2-cycle analytic example: X = (e1,e2,e2,e3)^T one-hot
/// attributes, Y = A_hat X, all nodes in the train split.
GeneratedDataset build_motivating_example();

/// Disjoint 2-cycles arranged in 4-node gadgets of two pairs sharing a middle
/// attribute class, generalizing the analytic example. Labels follow the
/// neighbor's attribute (Y = A_hat X). Requires an even num_pairs and
/// num_classes >= 3 * num_pairs / 2; seed 0 keeps the canonical class order.
GeneratedDataset build_counterexample_family(std::size_t num_pairs, std::size_t num_classes,
                                             std::uint64_t seed);

/// Samples a graph, attributes F*, a random psi*, and a filter alpha*, then
/// computes continuous targets phi(A_hat) psi*(F*) via the dense oracle.
/// Regenerates the filter when phi(A_hat) is singular (bounded retries).
GeneratedDataset generate_assumption1(const SynthConfig& cfg);

}  // namespace ld

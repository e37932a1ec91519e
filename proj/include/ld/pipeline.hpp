#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ld/labelops.hpp"
#include "ld/nn.hpp"
#include "ld/spectral.hpp"
#include "ld/synth.hpp"

namespace ld {

struct FilterSpec {
    enum class Kind { GcnPower, LearnablePoly };
    Kind kind = Kind::LearnablePoly;
    std::size_t hops = 2;
};

FilterCoeffs make_filter(const FilterSpec& spec);

/// Parses "gcn:N" or "poly:N".
FilterSpec parse_filter_spec(const std::string& text);
std::string filter_spec_string(const FilterSpec& spec);

struct TrainConfig {
    std::size_t n_hops = 2;          // N of the label deconvolution
    double alpha = 1.0;              // target mixing weight
    std::size_t ne_epochs = 100;
    std::size_t gnn_epochs = 200;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    TaskKind task = TaskKind::MultiClass;
    LossKind loss = LossKind::SoftCrossEntropy;
    AdamConfig optim;
    FilterSpec filter;
    bool warm_start_head = false;    // seed the GNN head from the NE-phase head
    std::size_t feature_dim = 16;
    std::vector<std::size_t> encoder_hidden;
    std::vector<std::size_t> head_hidden;
    bool encoder_bias = true;
    bool use_continuous_targets = false;  // train on generator targets (MSE runs)
    std::size_t joint_cap = 4096;    // full-batch joint training refuses beyond this
};

void validate(const TrainConfig& cfg);

struct PhaseResult {
    std::vector<double> loss_curve;                // one entry per epoch
    std::vector<std::vector<double>> gamma_curve;  // per-epoch softmax(gamma'), NE phase only
    std::size_t steps = 0;
    double elapsed_ms = 0.0;
};

/// NE training phase: mini-batch loop jointly optimizing the encoder, the
/// non-linear head, and the deconvolution logits against mixed inverse-label
/// targets. Per-step cost is independent of the graph size.
PhaseResult train_ne_phase(const Matrix& attrs, Mlp& encoder, Mlp& head,
                           const HopLabelStack& stack, DeconvWeights& w, const TrainConfig& cfg);

/// Batched encoder forward over all nodes; bit-identical for any batch size.
Matrix infer_features(const Matrix& attrs, const Mlp& encoder, std::size_t batch_size = 0);

/// GNN training phase on frozen features and true labels over the train split
/// (full batch). Learns the head and, when learnable, the filter.
PhaseResult train_gnn_phase(const Matrix& features, const NormalizedAdjacency& adj,
                            SpectralGnnParams& p, const Matrix& targets, const NodeSplit& split,
                            const TrainConfig& cfg);

/// Same loop as the NE phase with plain labels as targets (no graph term,
/// no deconvolution weights).
PhaseResult train_glem_baseline(const Matrix& attrs, Mlp& encoder, Mlp& head, const Matrix& y,
                                const TrainConfig& cfg);

/// End-to-end full-batch training of encoder + spectral GNN. Refuses graphs
/// larger than cfg.joint_cap.
PhaseResult train_joint_fullbatch(const Matrix& attrs, Mlp& encoder,
                                  const NormalizedAdjacency& adj, SpectralGnnParams& gnn,
                                  const Matrix& targets, const NodeSplit& split,
                                  const TrainConfig& cfg);

/// Trains a spectral GNN on the train split over frozen features, then fills
/// val/test label rows with its softmax (or sigmoid) predictions. Train rows
/// always keep the ground truth. One pass, no EM iteration.
LabelMatrix generate_pseudo_labels(const NormalizedAdjacency& adj, const Matrix& frozen_features,
                                   const LabelMatrix& y, const NodeSplit& split,
                                   const TrainConfig& cfg);

enum class Method { LD, GLEM, Joint, FrozenFeatures };

Method parse_method(const std::string& text);
std::string method_name(Method m);

struct ExperimentReport {
    std::string method;
    TrainConfig config;
    std::map<std::string, double> metrics;  // keys: train/val/test
    std::vector<double> ne_loss;
    std::vector<double> gnn_loss;
    std::vector<std::vector<double>> gamma;
    double preprocess_ms = 0.0;
    double ne_ms = 0.0;
    double gnn_ms = 0.0;
};

/// Wires preprocessing, phases, and metrics for one method. Empty val/test
/// splits are evaluated over all nodes (fully supervised analytic datasets).
ExperimentReport run_experiment(const GeneratedDataset& ds, Method method,
                                const TrainConfig& cfg);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
void save_report(const std::string& path, const ExperimentReport& report);
ExperimentReport load_report(const std::string& path);

/// CSV emission for analysis: <prefix>ne_loss.csv, <prefix>gnn_loss.csv and
/// <prefix>gamma.csv (epoch column first, then one column per weight).
void emit_curves(const ExperimentReport& report, const std::string& prefix);

/// Analytic 4-node example, both methods trained with mean-squared loss, a
/// bias-free linear encoder, an identity head, and the fixed one-hop filter.
struct MotivatingResult {
    Matrix f_ld;
    Matrix pred_ld;
    Matrix f_glem;
    Matrix pred_glem;
    Matrix beta_glem;           // trained GLEM encoder weight
    std::vector<double> gamma;  // trained deconvolution coefficients
    double acc_ld = 0.0;
    double acc_glem = 0.0;
};

MotivatingResult run_motivating_example(double alpha, std::uint64_t seed,
                                        std::size_t epochs = 4000);

}  // namespace ld

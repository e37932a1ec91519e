#include "ld/bundle.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bytes.hpp"

namespace ld {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kBundleVersion = 1;

void write_f32_array(const fs::path& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_bundle: cannot open " + path.string());
    for (double v : values) bytes::write_le<float>(out, static_cast<float>(v));
    if (!out) throw DataError("save_bundle: write failed for " + path.string());
}

std::vector<double> read_f32_array(const fs::path& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_bundle: cannot open " + path.string());
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = static_cast<double>(bytes::read_le<float>(in, path.string()));
    char extra;
    if (in.read(&extra, 1))
        throw DataError("load_bundle: " + path.string() + " longer than the manifest declares");
    return out;
}

void write_u32_array(const fs::path& path, std::span<const NodeId> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_bundle: cannot open " + path.string());
    for (NodeId v : values) bytes::write_le<std::uint32_t>(out, v);
}

std::vector<NodeId> read_u32_array(const fs::path& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_bundle: cannot open " + path.string());
    std::vector<NodeId> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = bytes::read_le<std::uint32_t>(in, path.string());
    return out;
}

}  // namespace

void save_bundle(const GeneratedDataset& ds, const std::string& dir) {
    const fs::path root(dir);
    fs::create_directories(root);

    json manifest;
    manifest["format_version"] = kBundleVersion;
    manifest["name"] = ds.name;
    manifest["task"] = ds.labels.task == TaskKind::MultiClass ? "multiclass" : "multilabel";
    manifest["num_nodes"] = ds.graph.num_nodes;
    manifest["num_edges"] = ds.graph.num_edges();
    manifest["attr_dim"] = ds.attrs.cols;
    manifest["num_classes"] = ds.labels.values.cols;
    manifest["split_sizes"] =
        json{{"train", ds.split.train.size()}, {"val", ds.split.val.size()},
             {"test", ds.split.test.size()}};
    manifest["has_targets"] = !ds.targets.empty();
    manifest["provenance"] =
        ds.provenance.empty() ? json(nullptr) : json::parse(ds.provenance, nullptr, false);

    std::vector<Edge> edges;
    edges.reserve(ds.graph.num_edges());
    for (std::size_t u = 0; u < ds.graph.num_nodes; ++u)
        for (NodeId v : ds.graph.neighbors(static_cast<NodeId>(u)))
            edges.emplace_back(static_cast<NodeId>(u), v);
    save_edge_list((root / "edges.txt").string(), edges);

    write_f32_array(root / "attrs.f32", ds.attrs.data);
    write_f32_array(root / "labels.f32", ds.labels.values.data);
    if (!ds.targets.empty()) write_f32_array(root / "targets.f32", ds.targets.data);
    write_u32_array(root / "split_train.u32", ds.split.train);
    write_u32_array(root / "split_val.u32", ds.split.val);
    write_u32_array(root / "split_test.u32", ds.split.test);

    std::ofstream mf(root / "manifest.json");
    if (!mf) throw DataError("save_bundle: cannot open manifest.json");
    mf << manifest.dump(2) << '\n';
    if (!mf) throw DataError("save_bundle: write failed for manifest.json");
}

GeneratedDataset load_bundle(const std::string& dir) {
    const fs::path root(dir);
    std::ifstream mf(root / "manifest.json");
    if (!mf) throw DataError("load_bundle: cannot open " + (root / "manifest.json").string());
    json manifest = json::parse(mf, nullptr, false);
    if (manifest.is_discarded()) throw DataError("load_bundle: manifest.json is not valid JSON");

    const int version = manifest.value("format_version", -1);
    if (version != kBundleVersion) {
        throw DataError("load_bundle: format_version " + std::to_string(version) +
                        " found, expected " + std::to_string(kBundleVersion));
    }

    GeneratedDataset ds;
    ds.name = manifest.value("name", "");
    const std::string task = manifest.value("task", "multiclass");
    ds.labels.task = task == "multilabel" ? TaskKind::MultiLabelBinary : TaskKind::MultiClass;

    const std::size_t num_nodes = manifest.at("num_nodes").get<std::size_t>();
    const std::size_t num_edges = manifest.at("num_edges").get<std::size_t>();
    const std::size_t attr_dim = manifest.at("attr_dim").get<std::size_t>();
    const std::size_t num_classes = manifest.at("num_classes").get<std::size_t>();

    const std::vector<Edge> edges = load_edge_list((root / "edges.txt").string());
    if (edges.size() != num_edges) {
        throw DataError("load_bundle: edges.txt has " + std::to_string(edges.size()) +
                        " edges, manifest declares " + std::to_string(num_edges));
    }
    ds.graph = build_csr(edges, num_nodes);

    ds.attrs = Matrix(num_nodes, attr_dim);
    ds.attrs.data = read_f32_array(root / "attrs.f32", num_nodes * attr_dim);
    ds.labels.values = Matrix(num_nodes, num_classes);
    ds.labels.values.data = read_f32_array(root / "labels.f32", num_nodes * num_classes);
    if (manifest.value("has_targets", false)) {
        ds.targets = Matrix(num_nodes, num_classes);
        ds.targets.data = read_f32_array(root / "targets.f32", num_nodes * num_classes);
    }

    const json& sizes = manifest.at("split_sizes");
    ds.split.train = read_u32_array(root / "split_train.u32", sizes.at("train").get<std::size_t>());
    ds.split.val = read_u32_array(root / "split_val.u32", sizes.at("val").get<std::size_t>());
    ds.split.test = read_u32_array(root / "split_test.u32", sizes.at("test").get<std::size_t>());
    for (const auto* part : {&ds.split.train, &ds.split.val, &ds.split.test})
        for (NodeId v : *part)
            if (v >= num_nodes) throw DataError("load_bundle: split index out of range");

    if (!manifest["provenance"].is_null()) ds.provenance = manifest["provenance"].dump();
    if (ds.provenance.find("alpha_star") != std::string::npos) {
        const json prov = json::parse(ds.provenance, nullptr, false);
        if (!prov.is_discarded() && prov.contains("alpha_star"))
            ds.alpha_star = prov["alpha_star"].get<std::vector<double>>();
    }
    return ds;
}

}  // namespace ld

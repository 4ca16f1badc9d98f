// Command-line front end: dataset generation, spanner builds, brute-force
// oracles, evaluation, clustering, and a small benchmark matrix. Every run
// that produces a file also writes a <out>.manifest.json capturing the
// resolved configuration, the dataset fingerprint, and the result counters,
// so any artifact can be reproduced from its manifest alone.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stars/stars.hpp"

namespace {

using nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

void write_json_file(const std::string& path, const ordered_json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

void write_manifest(const std::string& primary_out, const ordered_json& doc) {
    write_json_file(primary_out + ".manifest.json", doc);
}

// ---- dataset plumbing ----

struct DataOpts {
    std::string dense_path;
    std::string sets_path;
    std::string measure = "angular";
    double mixture_weight = 0.5;
};

void attach_data_opts(CLI::App* sub, DataOpts& d) {
    sub->add_option("--dataset", d.dense_path, "dense dataset file (header 'n d')");
    sub->add_option("--sets", d.sets_path, "weighted-set dataset file (token:weight per line)");
    sub->add_option("--measure", d.measure,
                    "similarity measure: angular|cosine|dot|jaccard|wjaccard|mixture")
        ->capture_default_str();
    sub->add_option("--mixture-weight", d.mixture_weight,
                    "dense share of the mixture measure")
        ->capture_default_str();
}

struct LoadedData {
    stars::Dataset dense;
    stars::Dataset sets;
    bool has_dense = false;
    bool has_sets = false;

    stars::DataView view() const {
        return {has_dense ? &dense : nullptr, has_sets ? &sets : nullptr};
    }

    std::uint64_t fp() const {
        std::uint64_t f = 0;
        if (has_dense) f = stars::fingerprint(dense);
        if (has_sets) f = stars::key_combine(f, stars::fingerprint(sets));
        return f;
    }
};

bool measure_needs_dense(stars::MeasureKind kind) {
    return kind == stars::MeasureKind::DotProduct || kind == stars::MeasureKind::Cosine ||
           kind == stars::MeasureKind::Angular || kind == stars::MeasureKind::Mixture;
}

bool measure_needs_sets(stars::MeasureKind kind) {
    return kind == stars::MeasureKind::Jaccard ||
           kind == stars::MeasureKind::WeightedJaccard ||
           kind == stars::MeasureKind::Mixture;
}

LoadedData load_data(const DataOpts& opts, stars::MeasureKind kind) {
    LoadedData data;
    const bool need_dense = measure_needs_dense(kind);
    const bool need_sets = measure_needs_sets(kind);
    if (need_dense && opts.dense_path.empty())
        throw std::runtime_error("measure '" + opts.measure + "' requires --dataset");
    if (need_sets && opts.sets_path.empty())
        throw std::runtime_error("measure '" + opts.measure + "' requires --sets");
    if (!need_dense && !opts.dense_path.empty())
        throw std::runtime_error("measure '" + opts.measure + "' does not use --dataset");
    if (!need_sets && !opts.sets_path.empty())
        throw std::runtime_error("measure '" + opts.measure + "' does not use --sets");
    if (need_dense) {
        data.dense = stars::load_dense(opts.dense_path);
        data.has_dense = true;
    }
    if (need_sets) {
        data.sets = stars::load_weighted_sets(opts.sets_path);
        data.has_sets = true;
    }
    return data;
}

// ---- hashing plumbing ----

struct HashOpts {
    std::string family = "auto";
    double granularity = 1.0;
};

void attach_hash_opts(CLI::App* sub, HashOpts& h) {
    sub->add_option("--lsh", h.family,
                    "hash family: auto|simhash|minhash|wminhash|mixed")
        ->capture_default_str();
    sub->add_option("--wjaccard-granularity", h.granularity,
                    "weight quantum for weighted minhash replicas")
        ->capture_default_str();
}

stars::FamilyKind default_family(stars::MeasureKind kind) {
    switch (kind) {
        case stars::MeasureKind::Jaccard: return stars::FamilyKind::MinHash;
        case stars::MeasureKind::WeightedJaccard: return stars::FamilyKind::WeightedMinHash;
        case stars::MeasureKind::Mixture: return stars::FamilyKind::Mixed;
        default: return stars::FamilyKind::SimHash;
    }
}

stars::HashFamily make_family(const HashOpts& opts, stars::MeasureKind kind,
                              std::uint64_t seed) {
    stars::HashFamily family;
    family.kind = opts.family == "auto" ? default_family(kind)
                                        : stars::family_from_name(opts.family);
    family.master_seed = seed;
    family.granularity = opts.granularity;
    stars::warn_on_mismatch(family.kind, kind);
    return family;
}

// ---- report helpers ----

void fold_build_counters(ordered_json& doc, const stars::BuildReport& report) {
    doc["comparisons"] = report.comparisons;
    doc["hash_evals"] = report.hash_evals;
    doc["edges_emitted"] = report.edges_emitted;
    doc["edges_final"] = report.edges_final;
}

void fold_build_timings(ordered_json& doc, const stars::BuildReport& report) {
    double compute = 0.0;
    for (const auto& [phase, seconds] : report.phase_seconds) {
        if (phase != "total" && phase != "merge") compute += seconds;
        doc["seconds_" + phase] = seconds;
    }
    doc["wall_seconds"] = report.phase_seconds.count("total")
                              ? report.phase_seconds.at("total")
                              : 0.0;
    doc["compute_seconds"] = compute;  // summed across worker threads
}

// ---- subcommands ----

struct GenOpts {
    std::size_t n = 1000;
    std::size_t dim = 100;
    std::size_t modes = 100;
    double sigma = 0.1;
    std::uint64_t seed = 0;
    std::string out;
    std::string labels;
    bool binary = false;
};

int run_gen(const GenOpts& g) {
    stars::MixtureSpec spec{g.n, g.dim, g.modes, g.sigma, g.seed};
    const stars::Dataset ds = stars::gen_gaussian_mixture(spec);
    stars::save_dense(g.out, ds, g.binary);
    if (!g.labels.empty()) stars::save_labels(g.labels, ds);

    ordered_json manifest;
    manifest["subcommand"] = "gen";
    manifest["n"] = g.n;
    manifest["dim"] = g.dim;
    manifest["modes"] = g.modes;
    manifest["sigma"] = g.sigma;
    manifest["seed"] = g.seed;
    manifest["binary"] = g.binary;
    manifest["dataset_fingerprint"] = hex64(stars::fingerprint(ds));
    manifest["out"] = g.out;
    manifest["labels"] = g.labels;
    write_manifest(g.out, manifest);
    return 0;
}

struct BuildCommon {
    DataOpts data;
    HashOpts hash;
    std::string out;
    std::string report_path;
    int threads = 0;
};

ordered_json threshold_manifest(const char* name, const BuildCommon& c,
                                const stars::ThresholdConfig& cfg, std::uint64_t fp) {
    ordered_json m;
    m["subcommand"] = name;
    m["measure"] = c.data.measure;
    m["mixture_weight"] = c.data.mixture_weight;
    m["lsh"] = c.hash.family;
    m["wjaccard_granularity"] = c.hash.granularity;
    m["r1"] = cfg.r1;
    m["repetitions"] = cfg.repetitions;
    m["sketch_length"] = cfg.sketch_length;
    m["leaders"] = cfg.leaders;
    m["max_bucket"] = cfg.max_bucket_size;
    m["seed"] = cfg.seed;
    m["dataset"] = c.data.dense_path;
    m["sets"] = c.data.sets_path;
    m["dataset_fingerprint"] = hex64(fp);
    m["out"] = c.out;
    m["report"] = c.report_path;
    return m;
}

int run_build_threshold(const BuildCommon& c, stars::ThresholdConfig cfg, bool all_pairs) {
    const stars::MeasureKind kind = stars::measure_from_name(c.data.measure);
    const LoadedData data = load_data(c.data, kind);
    const stars::Measure measure(kind, data.view(), c.data.mixture_weight);
    const stars::HashFamily family = make_family(c.hash, kind, cfg.seed);
    cfg.threads = c.threads;

    const stars::BuildResult result =
        all_pairs ? stars::build_allpairs_lsh(data.view(), measure, family, cfg)
                  : stars::build_threshold_spanner(data.view(), measure, family, cfg);
    stars::save_graph(c.out, result.graph);

    ordered_json manifest = threshold_manifest(
        all_pairs ? "build-allpairs-lsh" : "build-threshold", c, cfg, data.fp());
    fold_build_counters(manifest, result.report);
    write_manifest(c.out, manifest);

    if (!c.report_path.empty()) {
        ordered_json report = manifest;
        report["threads"] = static_cast<int>(stars::resolve_threads(c.threads));
        fold_build_timings(report, result.report);
        write_json_file(c.report_path, report);
    }
    return 0;
}

int run_build_knn(const BuildCommon& c, stars::SortingConfig cfg, const std::string& mode) {
    const stars::MeasureKind kind = stars::measure_from_name(c.data.measure);
    const LoadedData data = load_data(c.data, kind);
    const stars::Measure measure(kind, data.view(), c.data.mixture_weight);
    const stars::HashFamily family = make_family(c.hash, kind, cfg.seed);
    cfg.threads = c.threads;
    if (mode == "leaders") cfg.mode = stars::BlockMode::Leaders;
    else if (mode == "allpairs") cfg.mode = stars::BlockMode::AllPairsInBlock;
    else if (mode == "auto") cfg.mode = stars::BlockMode::Auto;
    else throw std::runtime_error("unknown --mode '" + mode + "'");

    const stars::BuildResult result =
        stars::build_knn_spanner(data.view(), measure, family, cfg);
    stars::save_graph(c.out, result.graph);

    ordered_json manifest;
    manifest["subcommand"] = "build-knn";
    manifest["measure"] = c.data.measure;
    manifest["mixture_weight"] = c.data.mixture_weight;
    manifest["lsh"] = c.hash.family;
    manifest["wjaccard_granularity"] = c.hash.granularity;
    manifest["k"] = cfg.k;
    manifest["window"] = cfg.window;
    manifest["sketch_dim"] = cfg.sketch_dim;
    manifest["repetitions"] = cfg.repetitions;
    manifest["leaders"] = cfg.leaders_per_block;
    manifest["mode"] = mode;
    manifest["auto_threshold"] = cfg.auto_threshold;
    manifest["degree_cap"] = cfg.degree_cap;
    manifest["max_block"] = cfg.max_block_size;
    manifest["seed"] = cfg.seed;
    manifest["dataset"] = c.data.dense_path;
    manifest["sets"] = c.data.sets_path;
    manifest["dataset_fingerprint"] = hex64(data.fp());
    manifest["out"] = c.out;
    manifest["report"] = c.report_path;
    fold_build_counters(manifest, result.report);
    write_manifest(c.out, manifest);

    if (!c.report_path.empty()) {
        ordered_json report = manifest;
        report["threads"] = static_cast<int>(stars::resolve_threads(c.threads));
        fold_build_timings(report, result.report);
        write_json_file(c.report_path, report);
    }
    return 0;
}

struct OracleOpts {
    DataOpts data;
    double r2 = 0.5;
    std::uint32_t k = 100;
    double inv_eps = 1.0;
    int threads = 0;
    std::string out;
    std::string report_path;
};

// Exact r2-threshold graph via exhaustive comparison; edge weights are the
// similarities themselves.
int run_oracle(const OracleOpts& o) {
    const stars::MeasureKind kind = stars::measure_from_name(o.data.measure);
    const LoadedData data = load_data(o.data, kind);
    const stars::Measure measure(kind, data.view(), o.data.mixture_weight);
    stars::ComparisonCounter counter;
    stars::OracleParams params{o.r2, o.k, o.inv_eps, true, o.threads};
    const stars::GroundTruth truth = stars::allpairs_oracle(measure, params, counter);

    stars::SimilarityGraph graph;
    graph.n = measure.size();
    std::size_t pair_count = 0;
    for (stars::PointId p = 0; p < graph.n; ++p)
        for (stars::PointId q : truth.threshold_partners[p])
            if (p < q) {
                graph.edges.push_back({p, q, measure(p, q)});
                ++pair_count;
            }
    stars::save_graph(o.out, graph);

    ordered_json manifest;
    manifest["subcommand"] = "oracle";
    manifest["measure"] = o.data.measure;
    manifest["mixture_weight"] = o.data.mixture_weight;
    manifest["r2"] = o.r2;
    manifest["k"] = o.k;
    manifest["inv_eps"] = o.inv_eps;
    manifest["dataset"] = o.data.dense_path;
    manifest["sets"] = o.data.sets_path;
    manifest["dataset_fingerprint"] = hex64(data.fp());
    manifest["out"] = o.out;
    manifest["report"] = o.report_path;
    manifest["comparisons"] = truth.comparisons;
    manifest["threshold_pairs"] = pair_count;
    write_manifest(o.out, manifest);
    if (!o.report_path.empty()) write_json_file(o.report_path, manifest);
    return 0;
}

struct EvalOpts {
    DataOpts data;
    std::string graph_path;
    double r2 = 0.5;
    double edge_floor = 0.495;
    std::uint32_t k = 100;
    double inv_eps = 1.01;
    int threads = 0;
    std::string out;
};

int run_eval(const EvalOpts& e) {
    const stars::MeasureKind kind = stars::measure_from_name(e.data.measure);
    const LoadedData data = load_data(e.data, kind);
    const stars::Measure measure(kind, data.view(), e.data.mixture_weight);
    const stars::SimilarityGraph graph = stars::load_graph(e.graph_path, measure.size());

    stars::ComparisonCounter counter;
    stars::OracleParams params{e.r2, e.k, e.inv_eps, true, e.threads};
    const stars::GroundTruth truth = stars::allpairs_oracle(measure, params, counter);
    const stars::EvalReport report =
        stars::evaluate_graph(graph, truth, e.edge_floor, e.threads);

    ordered_json doc;
    doc["subcommand"] = "eval";
    doc["graph"] = e.graph_path;
    doc["measure"] = e.data.measure;
    doc["mixture_weight"] = e.data.mixture_weight;
    doc["r2"] = e.r2;
    doc["edge_floor"] = e.edge_floor;
    doc["k"] = e.k;
    doc["inv_eps"] = e.inv_eps;
    doc["dataset"] = e.data.dense_path;
    doc["sets"] = e.data.sets_path;
    doc["dataset_fingerprint"] = hex64(data.fp());
    doc["out"] = e.out;
    doc["oracle_comparisons"] = truth.comparisons;
    doc["threshold_recall"] = report.threshold_recall;
    doc["threshold_recall_relaxed"] = report.threshold_recall_relaxed;
    doc["knn_recall_onehop"] = report.knn_recall_onehop;
    doc["knn_recall_twohop"] = report.knn_recall_twohop;
    doc["ann_recall_twohop"] = report.ann_recall_twohop;
    doc["ann_recall_exact"] = report.ann_recall_exact;
    doc["edges_at_threshold"] = report.edges_at_threshold;
    doc["total_edges"] = report.total_edges;
    write_json_file(e.out, doc);
    write_manifest(e.out, doc);
    std::printf("threshold_recall\t%.6f\nthreshold_recall_relaxed\t%.6f\nann_recall_twohop\t%.6f\n",
                report.threshold_recall, report.threshold_recall_relaxed,
                report.ann_recall_twohop);
    return 0;
}

struct ClusterOpts {
    DataOpts data;
    HashOpts hash;
    std::uint32_t k = 2;
    double c = 1.01;
    double r_min = 0.0;
    double r_max = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t repetitions = 200;
    std::uint32_t sketch_length = 4;
    std::uint32_t leaders = 25;
    std::size_t max_bucket = 10000;
    int threads = 0;
    std::string out;
    std::string partition_path;
};

int run_cluster(const ClusterOpts& o) {
    const stars::MeasureKind kind = stars::measure_from_name(o.data.measure);
    const LoadedData data = load_data(o.data, kind);
    const stars::Measure measure(kind, data.view(), o.data.mixture_weight);
    const stars::HashFamily family = make_family(o.hash, kind, o.seed);
    stars::ThresholdConfig base;
    base.repetitions = o.repetitions;
    base.sketch_length = o.sketch_length;
    base.leaders = o.leaders;
    base.max_bucket_size = o.max_bucket;
    base.seed = o.seed;
    base.threads = o.threads;

    const stars::SweepResult sweep = stars::single_linkage_sweep(
        data.view(), measure, family, o.k, o.c, o.r_min, o.r_max, base);

    std::printf("threshold\tcomponents\tselected\n");
    std::string levels;
    char buf[64];
    for (std::size_t i = 0; i < sweep.levels.size(); ++i) {
        const auto& level = sweep.levels[i];
        const bool sel = static_cast<std::int64_t>(i) == sweep.selected_index;
        std::printf("%.6f\t%u\t%s\n", level.threshold, level.component_count,
                    sel ? "yes" : "no");
        std::snprintf(buf, sizeof buf, "%s%.6f:%u", i ? ";" : "", level.threshold,
                      level.component_count);
        levels += buf;
    }

    ordered_json doc;
    doc["subcommand"] = "cluster";
    doc["measure"] = o.data.measure;
    doc["mixture_weight"] = o.data.mixture_weight;
    doc["lsh"] = o.hash.family;
    doc["k"] = o.k;
    doc["c"] = o.c;
    doc["r_min"] = o.r_min;
    doc["r_max"] = o.r_max;
    doc["repetitions"] = o.repetitions;
    doc["sketch_length"] = o.sketch_length;
    doc["leaders"] = o.leaders;
    doc["max_bucket"] = o.max_bucket;
    doc["seed"] = o.seed;
    doc["dataset"] = o.data.dense_path;
    doc["sets"] = o.data.sets_path;
    doc["dataset_fingerprint"] = hex64(data.fp());
    doc["levels"] = levels;
    doc["selected_index"] = sweep.selected_index;
    doc["selected_r"] = sweep.selected_r;

    if (sweep.selected_index >= 0) {
        const auto& level = sweep.levels[static_cast<std::size_t>(sweep.selected_index)];
        doc["selected_components"] = level.component_count;
        if (!o.partition_path.empty()) {
            const stars::Partition merged = stars::merge_to_k(level.partition, o.k);
            stars::save_partition(o.partition_path, merged);
            doc["partition"] = o.partition_path;
        }
    } else if (!o.partition_path.empty()) {
        std::fprintf(stderr, "stars: no sweep level reached %u components; "
                             "partition file not written\n", o.k);
    }
    if (!o.out.empty()) {
        write_json_file(o.out, doc);
        write_manifest(o.out, doc);
    } else if (!o.partition_path.empty() && sweep.selected_index >= 0) {
        write_manifest(o.partition_path, doc);
    }
    return 0;
}

struct VmeasureOpts {
    std::string pred;
    std::string truth;
    std::string out;
};

int run_vmeasure(const VmeasureOpts& o) {
    const stars::Partition pred = stars::load_partition(o.pred);
    const auto [labels, names] = stars::load_labels(o.truth);
    const double v = stars::vmeasure(pred, labels);
    std::printf("vmeasure\t%.6f\n", v);
    if (!o.out.empty()) {
        ordered_json doc;
        doc["subcommand"] = "vmeasure";
        doc["pred"] = o.pred;
        doc["truth"] = o.truth;
        doc["n"] = labels.size();
        doc["pred_clusters"] = pred.cluster_count;
        doc["truth_classes"] = names.size();
        doc["vmeasure"] = v;
        write_json_file(o.out, doc);
        write_manifest(o.out, doc);
    }
    return 0;
}

// ---- bench ----

struct BenchOpts {
    std::string preset = "desk-gaussian";
    std::size_t n = 2000;
    std::uint64_t seed = 7;
    int threads = 0;
    std::string out;
};

struct BenchRow {
    std::string method;
    std::uint64_t comparisons = 0;
    std::uint64_t hash_evals = 0;
    std::size_t edges_total = 0;
    std::size_t edges_at_r2 = 0;
    double threshold_recall = 0.0;
    double threshold_recall_relaxed = 0.0;
    double ann_recall = 0.0;
    double wall_seconds = 0.0;
};

// Desk-scale comparison matrix on the synthetic Gaussian mixture: brute
// force, threshold LSH with stars vs all pairs per bucket, and sorting LSH
// with leaders vs all pairs per block.
int run_bench(const BenchOpts& b) {
    if (b.preset != "desk-gaussian")
        throw std::runtime_error("unknown --preset '" + b.preset + "'");
    const double r2 = 0.5, edge_floor = 0.495;
    const std::uint32_t k = 100;
    const double inv_eps = 1.01;

    stars::MixtureSpec spec;
    spec.n = b.n;
    spec.seed = b.seed;
    const stars::Dataset ds = stars::gen_gaussian_mixture(spec);
    const stars::DataView view{&ds, nullptr};
    const stars::Measure measure(stars::MeasureKind::Angular, view);
    stars::HashFamily family;
    family.kind = stars::FamilyKind::SimHash;
    family.master_seed = b.seed;

    stars::ComparisonCounter counter;
    stars::OracleParams oparams{r2, k, inv_eps, true, b.threads};
    const auto t0 = std::chrono::steady_clock::now();
    const stars::GroundTruth truth = stars::allpairs_oracle(measure, oparams, counter);
    const double oracle_wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();

    std::vector<BenchRow> rows;
    const auto eval_row = [&](const std::string& name, const stars::SimilarityGraph& graph,
                              const stars::BuildReport& report, double wall) {
        const stars::EvalReport ev =
            stars::evaluate_graph(graph, truth, edge_floor, b.threads);
        BenchRow row;
        row.method = name;
        row.comparisons = report.comparisons;
        row.hash_evals = report.hash_evals;
        row.edges_total = graph.edges.size();
        row.edges_at_r2 = ev.edges_at_threshold;
        row.threshold_recall = ev.threshold_recall;
        row.threshold_recall_relaxed = ev.threshold_recall_relaxed;
        row.ann_recall = ev.ann_recall_twohop;
        row.wall_seconds = wall;
        rows.push_back(row);
    };

    {
        stars::SimilarityGraph exact;
        exact.n = measure.size();
        for (stars::PointId p = 0; p < exact.n; ++p)
            for (stars::PointId q : truth.threshold_partners[p])
                if (p < q) exact.edges.push_back({p, q, measure(p, q)});
        stars::BuildReport report;
        report.comparisons = truth.comparisons;
        report.edges_emitted = exact.edges.size();
        report.edges_final = exact.edges.size();
        eval_row("allpair", exact, report, oracle_wall);
    }

    stars::ThresholdConfig tcfg;
    tcfg.r1 = edge_floor;
    tcfg.repetitions = 400;
    tcfg.sketch_length = 2;  // short sketches keep buckets coarse enough to matter
    tcfg.leaders = 25;
    tcfg.max_bucket_size = 10000;
    tcfg.seed = b.seed;
    tcfg.threads = b.threads;
    {
        const stars::BuildResult r = stars::build_threshold_spanner(view, measure, family, tcfg);
        eval_row("lsh_stars", r.graph, r.report, r.report.phase_seconds.at("total"));
    }
    {
        const stars::BuildResult r = stars::build_allpairs_lsh(view, measure, family, tcfg);
        eval_row("lsh_allpairs", r.graph, r.report, r.report.phase_seconds.at("total"));
    }

    stars::SortingConfig scfg;
    scfg.k = k;
    scfg.window = 250;
    scfg.sketch_dim = 30;
    scfg.repetitions = 25;
    scfg.leaders_per_block = 25;
    scfg.degree_cap = 250;
    scfg.seed = b.seed;
    scfg.threads = b.threads;
    {
        scfg.mode = stars::BlockMode::Leaders;
        const stars::BuildResult r = stars::build_knn_spanner(view, measure, family, scfg);
        eval_row("sortlsh_stars", r.graph, r.report, r.report.phase_seconds.at("total"));
    }
    {
        scfg.mode = stars::BlockMode::AllPairsInBlock;
        const stars::BuildResult r = stars::build_knn_spanner(view, measure, family, scfg);
        eval_row("sortlsh_allpairs", r.graph, r.report, r.report.phase_seconds.at("total"));
    }

    std::string table =
        "method\tcomparisons\thash_evals\tedges_total\tedges_at_r2\t"
        "threshold_recall\tthreshold_recall_relaxed\tann_recall\twall_seconds\n";
    char line[384];
    for (const BenchRow& row : rows) {
        std::snprintf(line, sizeof line,
                      "%s\t%" PRIu64 "\t%" PRIu64 "\t%zu\t%zu\t%.6f\t%.6f\t%.6f\t%.3f\n",
                      row.method.c_str(), row.comparisons, row.hash_evals, row.edges_total,
                      row.edges_at_r2, row.threshold_recall, row.threshold_recall_relaxed,
                      row.ann_recall, row.wall_seconds);
        table += line;
    }
    std::fputs(table.c_str(), stdout);

    if (!b.out.empty()) {
        std::ofstream f(b.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + b.out);
        f << table;
        ordered_json manifest;
        manifest["subcommand"] = "bench";
        manifest["preset"] = b.preset;
        manifest["n"] = b.n;
        manifest["seed"] = b.seed;
        manifest["r2"] = r2;
        manifest["edge_floor"] = edge_floor;
        manifest["k"] = k;
        manifest["inv_eps"] = inv_eps;
        manifest["dataset_fingerprint"] = hex64(stars::fingerprint(ds));
        manifest["out"] = b.out;
        for (const BenchRow& row : rows) {
            manifest[row.method + "_comparisons"] = row.comparisons;
            manifest[row.method + "_edges"] = row.edges_total;
        }
        write_manifest(b.out, manifest);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stars: sparse two-hop similarity spanners via LSH with star sampling"};
    app.require_subcommand(1);

    GenOpts gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a Gaussian-mixture dataset");
    gen_cmd->add_option("--n", gen.n, "point count")->required();
    gen_cmd->add_option("--dim", gen.dim)->capture_default_str();
    gen_cmd->add_option("--modes", gen.modes)->capture_default_str();
    gen_cmd->add_option("--sigma", gen.sigma)->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "dense dataset output path")->required();
    gen_cmd->add_option("--labels", gen.labels, "mode labels output path");
    gen_cmd->add_flag("--binary", gen.binary, "write float32 payload instead of text");

    BuildCommon tcommon;
    stars::ThresholdConfig tcfg;
    CLI::App* bt_cmd = app.add_subcommand("build-threshold",
                                          "build a threshold spanner with star sampling");
    CLI::App* ap_cmd = app.add_subcommand("build-allpairs-lsh",
                                          "baseline: all pairs within each LSH bucket");
    for (CLI::App* sub : {bt_cmd, ap_cmd}) {
        attach_data_opts(sub, tcommon.data);
        attach_hash_opts(sub, tcommon.hash);
        sub->add_option("--r1", tcfg.r1, "edge admission floor")->required();
        sub->add_option("--reps", tcfg.repetitions)->capture_default_str();
        sub->add_option("--sketch-dim", tcfg.sketch_length)->capture_default_str();
        sub->add_option("--leaders", tcfg.leaders)->capture_default_str();
        sub->add_option("--max-bucket", tcfg.max_bucket_size)->capture_default_str();
        sub->add_option("--seed", tcfg.seed)->capture_default_str();
        sub->add_option("--threads", tcommon.threads)->capture_default_str();
        sub->add_option("--out", tcommon.out, "graph output path")->required();
        sub->add_option("--report", tcommon.report_path, "report JSON path");
    }

    BuildCommon kcommon;
    stars::SortingConfig kcfg;
    std::string kmode = "auto";
    CLI::App* bk_cmd = app.add_subcommand("build-knn",
                                          "build a k-NN spanner via sorting LSH");
    attach_data_opts(bk_cmd, kcommon.data);
    attach_hash_opts(bk_cmd, kcommon.hash);
    bk_cmd->add_option("--k", kcfg.k)->capture_default_str();
    bk_cmd->add_option("--window", kcfg.window)->capture_default_str();
    bk_cmd->add_option("--sketch-dim", kcfg.sketch_dim)->capture_default_str();
    bk_cmd->add_option("--reps", kcfg.repetitions)->capture_default_str();
    bk_cmd->add_option("--leaders", kcfg.leaders_per_block)->capture_default_str();
    bk_cmd->add_option("--mode", kmode, "leaders|allpairs|auto")->capture_default_str();
    bk_cmd->add_option("--auto-threshold", kcfg.auto_threshold)->capture_default_str();
    bk_cmd->add_option("--degree-cap", kcfg.degree_cap)->capture_default_str();
    bk_cmd->add_option("--max-block", kcfg.max_block_size)->capture_default_str();
    bk_cmd->add_option("--seed", kcfg.seed)->capture_default_str();
    bk_cmd->add_option("--threads", kcommon.threads)->capture_default_str();
    bk_cmd->add_option("--out", kcommon.out, "graph output path")->required();
    bk_cmd->add_option("--report", kcommon.report_path, "report JSON path");

    OracleOpts oracle;
    CLI::App* or_cmd = app.add_subcommand("oracle",
                                          "exact threshold graph by brute force");
    attach_data_opts(or_cmd, oracle.data);
    or_cmd->add_option("--r2", oracle.r2)->capture_default_str();
    or_cmd->add_option("--k", oracle.k)->capture_default_str();
    or_cmd->add_option("--inv-eps", oracle.inv_eps)->capture_default_str();
    or_cmd->add_option("--threads", oracle.threads)->capture_default_str();
    or_cmd->add_option("--out", oracle.out, "threshold graph output path")->required();
    or_cmd->add_option("--report", oracle.report_path, "report JSON path");

    EvalOpts eval;
    CLI::App* ev_cmd = app.add_subcommand("eval", "evaluate a graph against the oracle");
    attach_data_opts(ev_cmd, eval.data);
    ev_cmd->add_option("--graph", eval.graph_path)->required();
    ev_cmd->add_option("--r2", eval.r2)->capture_default_str();
    ev_cmd->add_option("--edge-floor", eval.edge_floor)->capture_default_str();
    ev_cmd->add_option("--k", eval.k)->capture_default_str();
    ev_cmd->add_option("--inv-eps", eval.inv_eps)->capture_default_str();
    ev_cmd->add_option("--threads", eval.threads)->capture_default_str();
    ev_cmd->add_option("--out", eval.out, "evaluation JSON path")->required();

    ClusterOpts cluster;
    CLI::App* cl_cmd = app.add_subcommand("cluster",
                                          "geometric threshold sweep for k clusters");
    attach_data_opts(cl_cmd, cluster.data);
    attach_hash_opts(cl_cmd, cluster.hash);
    cl_cmd->add_option("--k", cluster.k, "target cluster count")->required();
    cl_cmd->add_option("--c", cluster.c)->capture_default_str();
    cl_cmd->add_option("--r-min", cluster.r_min)->required();
    cl_cmd->add_option("--r-max", cluster.r_max)->required();
    cl_cmd->add_option("--reps", cluster.repetitions)->capture_default_str();
    cl_cmd->add_option("--sketch-dim", cluster.sketch_length)->capture_default_str();
    cl_cmd->add_option("--leaders", cluster.leaders)->capture_default_str();
    cl_cmd->add_option("--max-bucket", cluster.max_bucket)->capture_default_str();
    cl_cmd->add_option("--seed", cluster.seed)->capture_default_str();
    cl_cmd->add_option("--threads", cluster.threads)->capture_default_str();
    cl_cmd->add_option("--out", cluster.out, "sweep JSON path");
    cl_cmd->add_option("--partition", cluster.partition_path,
                       "write the selected level merged to k clusters");

    VmeasureOpts vm;
    CLI::App* vm_cmd = app.add_subcommand("vmeasure", "score a partition against labels");
    vm_cmd->add_option("--pred", vm.pred)->required();
    vm_cmd->add_option("--truth", vm.truth)->required();
    vm_cmd->add_option("--out", vm.out, "report JSON path");

    BenchOpts bench;
    CLI::App* be_cmd = app.add_subcommand("bench", "desk-scale method comparison matrix");
    be_cmd->add_option("--preset", bench.preset)->capture_default_str();
    be_cmd->add_option("--n", bench.n)->capture_default_str();
    be_cmd->add_option("--seed", bench.seed)->capture_default_str();
    be_cmd->add_option("--threads", bench.threads)->capture_default_str();
    be_cmd->add_option("--out", bench.out, "table output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (bt_cmd->parsed()) return run_build_threshold(tcommon, tcfg, false);
        if (ap_cmd->parsed()) return run_build_threshold(tcommon, tcfg, true);
        if (bk_cmd->parsed()) return run_build_knn(kcommon, kcfg, kmode);
        if (or_cmd->parsed()) return run_oracle(oracle);
        if (ev_cmd->parsed()) return run_eval(eval);
        if (cl_cmd->parsed()) return run_cluster(cluster);
        if (vm_cmd->parsed()) return run_vmeasure(vm);
        if (be_cmd->parsed()) return run_bench(bench);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "stars: %s\n", err.what());
        return 1;
    }
    std::fprintf(stderr, "stars: no subcommand\n");
    return 1;
}

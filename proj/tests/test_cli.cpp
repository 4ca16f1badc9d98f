#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = STARS_CLI_PATH;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

struct CliDir {
    fs::path root;
    explicit CliDir(const std::string& name)
        : root(fs::temp_directory_path() / ("stars_cli_" + name)) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~CliDir() { fs::remove_all(root); }
    std::string operator()(const std::string& name) const {
        return (root / name).string();
    }

    int run(const std::string& args, std::string* out = nullptr,
            const std::string& env_prefix = "") const {
        const std::string cmd = (env_prefix.empty() ? "" : env_prefix + " ") + "\"" +
                                kCli + "\" " + args + " >\"" + (*this)("stdout.txt") +
                                "\" 2>\"" + (*this)("stderr.txt") + "\"";
        const int status = std::system(cmd.c_str());
        if (out) *out = read_file((*this)("stdout.txt"));
        return status;
    }
};

}  // namespace

TEST_CASE("gen writes reproducible datasets with labels and a manifest") {
    CliDir dir("gen");
    const std::string base =
        "gen --n 120 --dim 8 --modes 4 --sigma 0.1 --seed 5 --labels " +
        dir("labels.tsv") + " --out ";
    REQUIRE(dir.run(base + dir("d1.txt")) == 0);
    REQUIRE(dir.run(base + dir("d2.txt")) == 0);
    REQUIRE(read_file(dir("d1.txt")) == read_file(dir("d2.txt")));
    REQUIRE(fs::exists(dir("labels.tsv")));
    REQUIRE(fs::exists(dir("d1.txt.manifest.json")));
    const json manifest = json::parse(read_file(dir("d1.txt.manifest.json")));
    REQUIRE(manifest["subcommand"] == "gen");
    REQUIRE(manifest["n"] == 120);
}

TEST_CASE("bad invocations fail with a nonzero status") {
    CliDir dir("badargs");
    REQUIRE(dir.run("") != 0);  // a subcommand is mandatory
    REQUIRE(dir.run("build-threshold --out x.tsv") != 0);  // --r1 missing
    REQUIRE(dir.run("gen --n 10 --out " + dir("d.txt") + " --frobnicate") != 0);
    REQUIRE(dir.run("eval --graph nosuch.tsv --out " + dir("e.json")) != 0);
    REQUIRE(dir.run("bench --preset nosuch") != 0);
}

TEST_CASE("threshold pipeline reaches high recall end to end") {
    CliDir dir("pipeline");
    REQUIRE(dir.run("gen --n 300 --dim 16 --modes 10 --sigma 0.1 --seed 2 --out " +
                    dir("data.txt")) == 0);
    REQUIRE(dir.run("build-threshold --dataset " + dir("data.txt") +
                    " --r1 0.55 --reps 150 --sketch-dim 2 --leaders 8 --seed 1 --out " +
                    dir("graph.tsv") + " --report " + dir("build.json")) == 0);
    REQUIRE(fs::exists(dir("graph.tsv.manifest.json")));

    std::string eval_out;
    REQUIRE(dir.run("eval --graph " + dir("graph.tsv") + " --dataset " + dir("data.txt") +
                    " --r2 0.6 --edge-floor 0.55 --k 20 --inv-eps 1.05 --out " +
                    dir("eval.json"), &eval_out) == 0);
    REQUIRE(eval_out.find("threshold_recall") != std::string::npos);

    const json eval = json::parse(read_file(dir("eval.json")));
    REQUIRE(eval["oracle_comparisons"] == 300 * 299 / 2);
    REQUIRE(eval["threshold_recall"].get<double>() >= 0.95);
    REQUIRE(eval["threshold_recall_relaxed"].get<double>() >=
            eval["threshold_recall"].get<double>());
    REQUIRE(eval["ann_recall_twohop"].get<double>() >=
            eval["ann_recall_exact"].get<double>());
    REQUIRE(eval["ann_recall_twohop"].get<double>() >= 0.8);

    const json build = json::parse(read_file(dir("build.json")));
    REQUIRE(build["comparisons"].get<std::uint64_t>() > 0);
    REQUIRE(build["wall_seconds"].get<double>() > 0.0);
}

TEST_CASE("the oracle's own graph evaluates to perfect threshold recall") {
    CliDir dir("oracle");
    REQUIRE(dir.run("gen --n 200 --dim 12 --modes 8 --sigma 0.1 --seed 3 --out " +
                    dir("data.txt")) == 0);
    REQUIRE(dir.run("oracle --dataset " + dir("data.txt") +
                    " --r2 0.6 --k 20 --out " + dir("exact.tsv")) == 0);
    REQUIRE(dir.run("eval --graph " + dir("exact.tsv") + " --dataset " + dir("data.txt") +
                    " --r2 0.6 --edge-floor 0.55 --k 20 --out " + dir("eval.json")) == 0);
    const json eval = json::parse(read_file(dir("eval.json")));
    REQUIRE(eval["threshold_recall"].get<double>() == 1.0);
    const json manifest = json::parse(read_file(dir("exact.tsv.manifest.json")));
    REQUIRE(manifest["comparisons"] == 200 * 199 / 2);
}

TEST_CASE("thread counts and reruns never change output bytes") {
    CliDir dir("threads");
    REQUIRE(dir.run("gen --n 150 --dim 8 --modes 5 --sigma 0.15 --seed 4 --out " +
                    dir("data.txt")) == 0);
    const std::string build = "build-threshold --dataset " + dir("data.txt") +
                              " --r1 0.6 --reps 60 --sketch-dim 2 --leaders 6 --seed 9 ";
    REQUIRE(dir.run(build + "--threads 1 --out " + dir("g1.tsv")) == 0);
    REQUIRE(dir.run(build + "--threads 3 --out " + dir("g3.tsv")) == 0);
    REQUIRE(dir.run(build + "--out " + dir("genv.tsv"), nullptr, "STARS_THREADS=2") == 0);
    REQUIRE(dir.run(build + "--threads 1 --out " + dir("g1b.tsv")) == 0);

    const std::string g1 = read_file(dir("g1.tsv"));
    REQUIRE(g1 == read_file(dir("g3.tsv")));
    REQUIRE(g1 == read_file(dir("genv.tsv")));
    REQUIRE(g1 == read_file(dir("g1b.tsv")));
    // identical manifests, identical graphs; thread count is not part of it
    const std::string m1 = read_file(dir("g1.tsv.manifest.json"));
    REQUIRE(m1.find("\"threads\"") == std::string::npos);
    std::string m3 = read_file(dir("g3.tsv.manifest.json"));
    const std::string from = dir("g3.tsv"), to = dir("g1.tsv");
    m3.replace(m3.find(from), from.size(), to);  // only the --out path differs
    REQUIRE(m1 == m3);

    // the knn builder honors the same contract
    const std::string knn = "build-knn --dataset " + dir("data.txt") +
                            " --k 10 --window 30 --sketch-dim 3 --reps 5 --leaders 5 "
                            "--degree-cap 15 --seed 2 ";
    REQUIRE(dir.run(knn + "--threads 1 --out " + dir("k1.tsv")) == 0);
    REQUIRE(dir.run(knn + "--threads 4 --out " + dir("k4.tsv")) == 0);
    REQUIRE(read_file(dir("k1.tsv")) == read_file(dir("k4.tsv")));
}

TEST_CASE("vmeasure prints the score with six decimals") {
    CliDir dir("vmeasure");
    std::ofstream(dir("pred.tsv")) << "0\t0\n1\t0\n2\t1\n3\t1\n";
    std::ofstream(dir("truth.tsv")) << "0\ta\n1\ta\n2\tb\n3\tb\n";
    std::string out;
    REQUIRE(dir.run("vmeasure --pred " + dir("pred.tsv") + " --truth " + dir("truth.tsv"),
                    &out) == 0);
    REQUIRE(out == "vmeasure\t1.000000\n");
}

TEST_CASE("cluster sweep recovers planted modes through the cli") {
    CliDir dir("cluster");
    REQUIRE(dir.run("gen --n 90 --dim 6 --modes 3 --sigma 0.02 --seed 60 --labels " +
                    dir("labels.tsv") + " --out " + dir("data.txt")) == 0);
    std::string out;
    REQUIRE(dir.run("cluster --dataset " + dir("data.txt") +
                    " --k 3 --r-min 0.7 --r-max 0.97 --c 1.05 --reps 150 "
                    "--sketch-dim 2 --leaders 8 --partition " + dir("part.tsv") +
                    " --out " + dir("sweep.json"), &out) == 0);
    REQUIRE(out.find("threshold\tcomponents\tselected") != std::string::npos);
    REQUIRE(out.find("yes") != std::string::npos);

    const json sweep = json::parse(read_file(dir("sweep.json")));
    REQUIRE(sweep["selected_index"].get<std::int64_t>() >= 0);
    REQUIRE(sweep["selected_components"].get<std::uint32_t>() >= 3);

    std::string score;
    REQUIRE(dir.run("vmeasure --pred " + dir("part.tsv") + " --truth " + dir("labels.tsv"),
                    &score) == 0);
    REQUIRE(score == "vmeasure\t1.000000\n");
}

TEST_CASE("bench emits a row per method") {
    CliDir dir("bench");
    std::string out;
    REQUIRE(dir.run("bench --n 250 --seed 7 --out " + dir("bench.tsv"), &out) == 0);
    const std::string table = read_file(dir("bench.tsv"));
    REQUIRE(out == table);
    for (const char* method : {"allpair", "lsh_stars", "lsh_allpairs",
                               "sortlsh_stars", "sortlsh_allpairs"})
        REQUIRE(table.find(method) != std::string::npos);
    REQUIRE(table.find("method\tcomparisons") == 0);
    const json manifest = json::parse(read_file(dir("bench.tsv.manifest.json")));
    REQUIRE(manifest["allpair_comparisons"] == 250 * 249 / 2);
}

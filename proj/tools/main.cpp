// Batch front end: matching, evaluation and debugging commands.

#include "wxbs/evaluation.hpp"
#include "wxbs/image_io.hpp"
#include "wxbs/svg.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace wxbs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMatchFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Outputs are write-once unless --force.
std::ofstream openOutput(const std::string& path, bool force) {
    if (!force && fs::exists(path)) {
        throw UsageError("output exists (use --force to overwrite): " + path);
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write: " + path);
    return out;
}

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MatcherConfig loadConfig(const std::string& configPath, uint64_t seed, int threads,
                         const std::string& model) {
    MatcherConfig cfg;
    if (!configPath.empty()) {
        try {
            cfg = matcherConfigFromJson(readFile(configPath));
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError("bad config " + configPath + ": " + e.what());
        }
    }
    cfg.ransac.seed = seed;
    if (threads >= 0) cfg.threads = threads;
    if (model == "F") {
        cfg.wantModel = WantModel::Fund;
    } else if (model == "H") {
        cfg.wantModel = WantModel::Hom;
    } else if (model == "auto" || model.empty()) {
        cfg.wantModel = WantModel::Auto;
    } else {
        throw UsageError("unknown model kind: " + model);
    }
    return cfg;
}

GrayImage loadGrayOrThrow(const std::string& path) {
    try {
        return loadImageGray(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string(e.what()));
    }
}

void drawLine(RgbImage& img, double x0, double y0, double x1, double y1, float r, float g,
              float b) {
    const int steps = static_cast<int>(std::max(std::abs(x1 - x0), std::abs(y1 - y0))) + 1;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
        const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
        float* px = &img.pixels[(static_cast<size_t>(y) * img.width + x) * 3];
        px[0] = r;
        px[1] = g;
        px[2] = b;
    }
}

RgbImage sideBySide(const GrayImage& img1, const GrayImage& img2,
                    const std::vector<Correspondence>& matches) {
    RgbImage canvas;
    canvas.width = img1.width + img2.width;
    canvas.height = std::max(img1.height, img2.height);
    canvas.pixels.assign(static_cast<size_t>(canvas.width) * canvas.height * 3, 0.0f);
    const auto blit = [&](const GrayImage& img, int offsetX) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                float* px = &canvas.pixels[(static_cast<size_t>(y) * canvas.width + x + offsetX) * 3];
                px[0] = px[1] = px[2] = img.at(x, y);
            }
        }
    };
    blit(img1, 0);
    blit(img2, img1.width);
    for (const Correspondence& c : matches) {
        drawLine(canvas, c.a.laf.center.x(), c.a.laf.center.y(),
                 c.b.laf.center.x() + img1.width, c.b.laf.center.y(), 0.1f, 0.9f, 0.1f);
    }
    return canvas;
}

// For homography-annotated pairs Eq. 1 counting runs over a synthetic grid of
// exact correspondences generated from the GT homography.
std::vector<PointPair> gridCorrespondences(const Eigen::Matrix3d& h, int width, int height) {
    std::vector<PointPair> pairs;
    for (int gy = 0; gy < 5; ++gy) {
        for (int gx = 0; gx < 5; ++gx) {
            const double x = (gx + 0.5) * width / 5.0;
            const double y = (gy + 0.5) * height / 5.0;
            const Eigen::Vector3d q = h * Eigen::Vector3d(x, y, 1.0);
            if (std::abs(q(2)) < 1e-12) continue;
            pairs.push_back({Point2(x, y), Point2(q(0) / q(2), q(1) / q(2))});
        }
    }
    return pairs;
}

int runMatch(const std::string& img1Path, const std::string& img2Path,
             const std::string& configPath, const std::string& outPath,
             const std::string& vizPath, uint64_t seed, int threads, const std::string& model,
             bool force) {
    const MatcherConfig cfg = loadConfig(configPath, seed, threads, model);
    const GrayImage img1 = loadGrayOrThrow(img1Path);
    const GrayImage img2 = loadGrayOrThrow(img2Path);

    const MatchReport report = matchPair(img1, img2, cfg);

    openOutput(outPath, force) << matchReportToJson(report) << '\n';
    const std::string csvPath = fs::path(outPath).replace_extension(".csv").string();
    {
        std::ofstream csv = openOutput(csvPath, force);
        writeCorrespondencesCsv(csv, report.finalCorrespondences);
    }
    if (!vizPath.empty()) {
        if (!force && fs::exists(vizPath)) {
            throw UsageError("output exists (use --force to overwrite): " + vizPath);
        }
        savePng(vizPath, sideBySide(img1, img2, report.finalCorrespondences));
    }
    if (!report.succeeded) {
        std::cerr << "matching failed: fewer than the required number of verified matches\n";
        return kExitMatchFailed;
    }
    return kExitOk;
}

int runEvalMatcher(const std::string& manifestPath, const std::string& configPath,
                   const std::string& outDir, uint64_t seed, int threads, bool force) {
    const MatcherConfig baseCfg = loadConfig(configPath, seed, threads, "");
    std::vector<GroundTruthPair> pairs;
    try {
        pairs = loadManifest(manifestPath);
    } catch (const std::exception& e) {
        throw UsageError(std::string(e.what()));
    }
    if (pairs.empty()) throw UsageError("manifest lists no pairs: " + manifestPath);
    fs::create_directories(outDir);

    const std::vector<double> grid = defaultThresholdGrid();
    std::map<std::string, std::vector<RecallCurve>> byCategory;
    for (const GroundTruthPair& gt : pairs) {
        const GrayImage img1 = loadGrayOrThrow(gt.imagePath1);
        const GrayImage img2 = loadGrayOrThrow(gt.imagePath2);
        MatcherConfig cfg = baseCfg;
        cfg.wantModel = gt.modelKind == ModelKind::Fund ? WantModel::Fund : WantModel::Hom;
        const MatchReport report = matchPair(img1, img2, cfg);

        RecallCurve curve;
        curve.thresholds = grid;
        curve.recall.assign(grid.size(), 0.0);
        if (report.succeeded && report.model && report.model->kind == gt.modelKind) {
            GroundTruthPair scored = gt;
            if (gt.modelKind == ModelKind::Hom) {
                scored.gtCorrespondences =
                    gridCorrespondences(*gt.gtHomography, img1.width, img1.height);
            }
            curve = pairRecall(scored, *report.model, grid);
        }
        byCategory[gt.category].push_back(curve);

        std::ofstream out = openOutput((fs::path(outDir) / (gt.id + "_recall.csv")).string(), force);
        writeRecallCsv(out, curve);
    }

    for (const auto& [category, curves] : byCategory) {
        const RecallCurve mean = categoryRecall(curves);
        {
            std::ofstream out =
                openOutput((fs::path(outDir) / (category + "_recall.csv")).string(), force);
            writeRecallCsv(out, mean);
        }
        SvgSeries series{category, mean.thresholds, mean.recall};
        std::ofstream svg =
            openOutput((fs::path(outDir) / (category + "_recall.svg")).string(), force);
        writeSvgChart(svg, "Recall, category " + category, "threshold (px)", "recall", {series});
    }
    return kExitOk;
}

std::vector<Laf> detectLafs(const GrayImage& img, int cap) {
    DetectorConfig cfg;
    std::vector<Keypoint> keypoints = detect(img, cfg, DetectorKind::DoG);
    if (static_cast<int>(keypoints.size()) > cap) keypoints.resize(cap);
    std::vector<Laf> lafs;
    for (const Keypoint& k : keypoints) {
        for (const OrientedKeypoint& ok : assignOrientations(img, k)) {
            lafs.push_back(keypointToLaf(ok.keypoint, ok.orientation));
        }
    }
    return lafs;
}

int runEvalDesc(const std::string& manifestPath, const std::vector<std::string>& descNames,
                const std::string& outDir, bool force) {
    std::vector<GroundTruthPair> pairs;
    try {
        pairs = loadManifest(manifestPath);
    } catch (const std::exception& e) {
        throw UsageError(std::string(e.what()));
    }
    if (pairs.empty()) throw UsageError("manifest lists no pairs: " + manifestPath);
    std::vector<DescriptorKind> kinds;
    for (const std::string& name : descNames) {
        try {
            kinds.push_back(descriptorKindFromName(name));
        } catch (const std::exception& e) {
            throw UsageError(std::string(e.what()));
        }
    }
    if (kinds.size() < 1) throw UsageError("at least one descriptor kind required");
    fs::create_directories(outDir);

    std::vector<double> ratioGrid;
    for (int i = 1; i <= 20; ++i) ratioGrid.push_back(i * 0.05);

    std::ofstream mapTable = openOutput((fs::path(outDir) / "map_table.csv").string(), force);
    mapTable << "pair,descriptor,map\n";

    std::map<std::string, std::set<int>> correctByDesc;
    int indexOffset = 0;
    for (const GroundTruthPair& gt : pairs) {
        if (gt.modelKind != ModelKind::Hom) continue;
        const GrayImage img1 = loadGrayOrThrow(gt.imagePath1);
        const GrayImage img2 = loadGrayOrThrow(gt.imagePath2);
        const std::vector<Laf> detections = detectLafs(img1, 300);
        const auto lafPairs = descEvalPrepare(gt, detections, img2.width, img2.height);
        if (lafPairs.size() < 2) continue;

        std::vector<SvgSeries> prSeries;
        for (DescriptorKind kind : kinds) {
            std::vector<Descriptor> desc1, desc2;
            for (const auto& [laf1, laf2] : lafPairs) {
                desc1.push_back(describeLaf(img1, laf1, kind));
                desc2.push_back(describeLaf(img2, laf2, kind));
            }
            const PrCurve curve = descPrecisionRecallFromDescriptors(desc1, desc2, ratioGrid);
            const std::string name = descriptorKindName(kind);
            {
                std::ofstream out = openOutput(
                    (fs::path(outDir) / (gt.id + "_" + name + "_pr.csv")).string(), force);
                writePrCsv(out, curve);
            }
            mapTable << gt.id << ',' << name << ',' << curve.meanAveragePrecision << '\n';
            prSeries.push_back({name, curve.recall, curve.precision});

            for (int i : correctMatchSet(desc1, desc2)) {
                correctByDesc[name].insert(indexOffset + i);
            }
        }
        std::ofstream svg = openOutput((fs::path(outDir) / (gt.id + "_pr.svg")).string(), force);
        writeSvgChart(svg, "Precision-recall, " + gt.id, "recall", "precision", prSeries);
        indexOffset += static_cast<int>(lafPairs.size());
    }

    if (correctByDesc.size() >= 2) {
        std::ofstream out = openOutput((fs::path(outDir) / "complementarity.csv").string(), force);
        out << "first,second,union\n";
        for (const DescriptorPairing& p : complementarityPairs(correctByDesc)) {
            out << p.first << ',' << p.second << ',' << p.unionSize << '\n';
        }
    }
    return kExitOk;
}

int runSynthDemo(const std::string& imagePath, int iteration, const std::string& outDir,
                 bool force) {
    const GrayImage img = loadGrayOrThrow(imagePath);
    const SynthSchedule schedule = defaultSchedule();
    if (iteration < 1 || iteration > static_cast<int>(schedule.iterations.size())) {
        throw UsageError("iteration out of range");
    }
    fs::create_directories(outDir);
    const std::vector<SynthView> views = synthesizeViews(img, schedule.iterations[iteration - 1]);
    std::ofstream meta = openOutput((fs::path(outDir) / "views.csv").string(), force);
    meta << "index,scale,tilt,rotation,width,height\n";
    for (size_t i = 0; i < views.size(); ++i) {
        const SynthView& v = views[i];
        std::ostringstream name;
        name << "view_" << i << ".png";
        const std::string path = (fs::path(outDir) / name.str()).string();
        if (!force && fs::exists(path)) {
            throw UsageError("output exists (use --force to overwrite): " + path);
        }
        savePng(path, v.image);
        meta << i << ',' << v.scale << ',' << v.tilt << ',' << v.rotation << ','
             << v.image.width << ',' << v.image.height << '\n';
    }
    return kExitOk;
}

int runDetectDemo(const std::string& imagePath, const std::string& detectorName,
                  const std::string& outPath, bool force) {
    const GrayImage img = loadGrayOrThrow(imagePath);
    DetectorKind kind;
    try {
        kind = detectorKindFromName(detectorName);
    } catch (const std::exception& e) {
        throw UsageError(std::string(e.what()));
    }
    DetectorConfig cfg;
    std::vector<OrientedKeypoint> oriented;
    for (const Keypoint& k : detect(img, cfg, kind)) {
        for (const OrientedKeypoint& ok : assignOrientations(img, k)) {
            oriented.push_back(ok);
        }
    }
    std::ofstream out = openOutput(outPath, force);
    writeKeypointsCsv(out, oriented);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wide-multiple-baseline stereo matcher and evaluation harness"};
    app.require_subcommand(1);

    uint64_t seed = 42;
    int threads = -1;
    bool force = false;
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--threads", threads, "Worker thread count (default: available parallelism)")
        ->envname("WXBS_THREADS");
    app.add_flag("--force", force, "Overwrite existing output files");

    std::string img1, img2, configPath, outPath, vizPath, model = "auto";
    CLI::App* match = app.add_subcommand("match", "Match an image pair")->fallthrough();
    match->add_option("img1", img1, "First image")->required();
    match->add_option("img2", img2, "Second image")->required();
    match->add_option("--config", configPath, "Matcher config JSON");
    match->add_option("--out", outPath, "Report JSON path")->required();
    match->add_option("--viz", vizPath, "Side-by-side visualization PNG");
    match->add_option("--model", model, "Model kind: F, H or auto")->capture_default_str();

    std::string manifestPath, outDir;
    CLI::App* evalMatcher = app.add_subcommand("eval-matcher", "Recall over a GT manifest")
                                 ->fallthrough();
    evalMatcher->add_option("--manifest", manifestPath, "Dataset manifest JSON")->required();
    evalMatcher->add_option("--config", configPath, "Matcher config JSON");
    evalMatcher->add_option("--out-dir", outDir, "Output directory")->required();

    std::vector<std::string> descNames;
    CLI::App* evalDesc = app.add_subcommand("eval-desc", "Descriptor precision-recall")->fallthrough();
    evalDesc->add_option("--manifest", manifestPath, "Dataset manifest JSON")->required();
    evalDesc->add_option("--desc", descNames, "Descriptor kinds")->required();
    evalDesc->add_option("--out-dir", outDir, "Output directory")->required();

    std::string imagePath, detectorName = "DoG";
    int iteration = 3;
    CLI::App* synthDemo = app.add_subcommand("synth-demo", "Dump synthesized views")->fallthrough();
    synthDemo->add_option("--image", imagePath, "Input image")->required();
    synthDemo->add_option("--iter", iteration, "Schedule iteration (1-based)")
        ->capture_default_str();
    synthDemo->add_option("--out-dir", outDir, "Output directory")->required();

    CLI::App* detectDemo = app.add_subcommand("detect-demo", "Dump detected keypoints")->fallthrough();
    detectDemo->add_option("--image", imagePath, "Input image")->required();
    detectDemo->add_option("--detector", detectorName, "DoG or Hessian")->capture_default_str();
    detectDemo->add_option("--out", outPath, "Keypoint CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (match->parsed()) {
            return runMatch(img1, img2, configPath, outPath, vizPath, seed, threads, model, force);
        }
        if (evalMatcher->parsed()) {
            return runEvalMatcher(manifestPath, configPath, outDir, seed, threads, force);
        }
        if (evalDesc->parsed()) {
            return runEvalDesc(manifestPath, descNames, outDir, force);
        }
        if (synthDemo->parsed()) {
            return runSynthDemo(imagePath, iteration, outDir, force);
        }
        if (detectDemo->parsed()) {
            return runDetectDemo(imagePath, detectorName, outPath, force);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

#include <doctest.h>

#include "oracles.hpp"
#include "shotladder/pipeline.hpp"

using namespace shotladder;

TEST_CASE("dataset-backed oracle ladders equal reference ladders on synthetic data") {
    const Config config = default_config();
    for (uint64_t seed : {3ULL, 17ULL, 91ULL}) {
        CAPTURE(seed);
        const SynthResult synth = synth_dataset(seed, 4, config.synth);
        const auto filtered = filter_constraints(synth.dataset.points, config.grid.quality_min,
                                                 config.grid.quality_max);
        for (const SynthVideo& video : synth.videos) {
            std::vector<RQPoint> pts;
            for (const RQPoint& p : filtered)
                if (p.video_id == video.video_id) pts.push_back(p);
            const ParetoFront front = pareto_front(pts);

            const Ladder oracle_b =
                build_bitrate_ladder(empirical_quality_predictor(pts), config.ladder);
            const Ladder ref_b = reference_ladder(front, config.ladder, LadderKind::Bitrate);
            for (const LadderStep& step : ref_b.steps) {
                for (const LadderStep& o : oracle_b.steps)
                    if (o.level == step.level) CHECK(o.resolution == step.resolution);
            }

            const Ladder oracle_q =
                build_quality_ladder(empirical_bitrate_predictor(pts), config.ladder);
            const Ladder ref_q = reference_ladder(front, config.ladder, LadderKind::Quality);
            for (const LadderStep& step : ref_q.steps) {
                for (const LadderStep& o : oracle_q.steps)
                    if (o.level == step.level) CHECK(o.resolution == step.resolution);
            }
        }
    }
}

TEST_CASE("synth fixed ladder is content-independent and monotone") {
    const Config config = default_config();
    const Ladder fixed = synth_fixed_ladder(config.synth, config.ladder, LadderKind::Bitrate);
    REQUIRE(fixed.steps.size() == config.ladder.bitrate_steps.size());
    for (size_t i = 1; i < fixed.steps.size(); ++i)
        CHECK(fixed.steps[i].resolution.pixels() >= fixed.steps[i - 1].resolution.pixels());
    // both endpoints of the rung set appear
    CHECK(fixed.steps.front().resolution.pixels() < fixed.steps.back().resolution.pixels());

    const Ladder fixed_q = synth_fixed_ladder(config.synth, config.ladder, LadderKind::Quality);
    for (size_t i = 1; i < fixed_q.steps.size(); ++i)
        CHECK(fixed_q.steps[i].resolution.pixels() >= fixed_q.steps[i - 1].resolution.pixels());
}

TEST_CASE("evaluating the reference ladder against itself is exactly neutral") {
    const Config config = default_config();
    const SynthResult synth = synth_dataset(5, 2, config.synth);
    const auto filtered = filter_constraints(synth.dataset.points, config.grid.quality_min,
                                             config.grid.quality_max);
    std::vector<RQPoint> pts;
    for (const RQPoint& p : filtered)
        if (p.video_id == synth.videos[0].video_id) pts.push_back(p);

    const Ladder ref =
        reference_ladder(pareto_front(pts), config.ladder, LadderKind::Bitrate);
    const auto hull = ladder_to_hull(ref, pts);
    const BdResult r = bd_metrics(hull, hull);
    CHECK(std::fabs(r.bd_rate) < 1e-9);
    CHECK(std::fabs(r.bd_quality) < 1e-9);

    std::map<std::string, BdPair> m{{"v", {r.bd_rate, r.bd_quality}}};
    const ClosenessResult c = closeness(m, m);
    CHECK(c.f25 == 1.0);
    CHECK(c.f50 == 1.0);
    CHECK(c.f75 == 1.0);
}

TEST_CASE("small synthetic pipeline run passes its gates") {
    Config config = default_config();
    config.trees.n_trees = 60; // keep the unit suite brisk
    const SynthRunResult r = run_synth_pipeline(11, 12, config);
    CHECK(r.oracle_mismatches == 0);
    CHECK(r.gates.oracle_ladders_match);
    CHECK(r.gates.mean_bd_rate_vs_reference <= 3.0);
    CHECK(r.gates.f25 >= 0.8);
    CHECK(r.gates.monotone_fraction >= 0.95);
    CHECK(r.rows.size() == 3); // 12 videos -> 9/1/2 split, 3 held out
    const std::string csv = r.rows_to_csv();
    CHECK(csv.find("mean") != std::string::npos);
}

#include <doctest.h>

#include <cstring>
#include <sstream>

#include "oracles.hpp"
#include "shotladder/error.hpp"
#include "shotladder/media.hpp"
#include "shotladder/stats.hpp"

using namespace shotladder;

namespace {

std::string tiny_y4m_8bit() {
    // 2 frames, 16x16, luma 50/51, chroma 100/200
    std::string s = "YUV4MPEG2 W16 H16 F30:1 Ip A1:1 C420\n";
    for (int f = 0; f < 2; ++f) {
        s += "FRAME\n";
        s.append(16 * 16, static_cast<char>(50 + f));
        s.append(8 * 8, static_cast<char>(100));
        s.append(8 * 8, static_cast<char>(200));
    }
    return s;
}

} // namespace

TEST_CASE("parse_y4m decodes a hand-written 8-bit file") {
    std::istringstream in(tiny_y4m_8bit());
    const VideoClip clip = parse_y4m(in);
    CHECK(clip.width == 16);
    CHECK(clip.height == 16);
    CHECK(clip.bit_depth == 8);
    CHECK(clip.frame_count() == 2);
    CHECK(clip.fps_num == 30);
    CHECK(clip.frames[0].luma.at(3, 7) == 50.0f);
    CHECK(clip.frames[1].luma.at(0, 0) == 51.0f);
    CHECK(clip.frames[0].chroma_u.at(2, 2) == 100.0f);
    CHECK(clip.frames[0].chroma_v.at(7, 7) == 200.0f);
}

TEST_CASE("parse_y4m rejects unsupported layouts and malformed streams") {
    SUBCASE("4:4:4") {
        std::istringstream in("YUV4MPEG2 W16 H16 F30:1 C444\nFRAME\n");
        CHECK_THROWS_AS(parse_y4m(in), FormatError);
    }
    SUBCASE("mono") {
        std::istringstream in("YUV4MPEG2 W16 H16 F30:1 Cmono\nFRAME\n");
        CHECK_THROWS_AS(parse_y4m(in), FormatError);
    }
    SUBCASE("bad magic") {
        std::istringstream in("RIFFxxxx");
        CHECK_THROWS_AS(parse_y4m(in), FormatError);
    }
    SUBCASE("truncated frame payload") {
        std::string s = tiny_y4m_8bit();
        s.resize(s.size() - 40);
        std::istringstream in(s);
        CHECK_THROWS_AS(parse_y4m(in), FormatError);
    }
    SUBCASE("missing dimensions") {
        std::istringstream in("YUV4MPEG2 F30:1 C420\nFRAME\n");
        CHECK_THROWS_AS(parse_y4m(in), FormatError);
    }
    SUBCASE("stream cut inside a frame header") {
        std::string s = tiny_y4m_8bit() + "FRA";
        std::istringstream in(s);
        CHECK_THROWS_AS(parse_y4m(in), FormatError);
    }
}

TEST_CASE("y4m write/parse round-trips sample-exactly") {
    for (int depth : {8, 10}) {
        CAPTURE(depth);
        const VideoClip clip = oracles::make_clip(32, 24, depth == 10 ? 64 : 5, depth, 77 + depth);
        std::stringstream buf;
        write_y4m(clip, buf);
        const VideoClip back = parse_y4m(buf);
        REQUIRE(back.frame_count() == clip.frame_count());
        CHECK(back.bit_depth == depth);
        for (int f = 0; f < clip.frame_count(); ++f) {
            CHECK(std::memcmp(back.frames[f].luma.samples.data(),
                              clip.frames[f].luma.samples.data(),
                              clip.frames[f].luma.size() * sizeof(float)) == 0);
            CHECK(std::memcmp(back.frames[f].chroma_u.samples.data(),
                              clip.frames[f].chroma_u.samples.data(),
                              clip.frames[f].chroma_u.size() * sizeof(float)) == 0);
            CHECK(std::memcmp(back.frames[f].chroma_v.samples.data(),
                              clip.frames[f].chroma_v.samples.data(),
                              clip.frames[f].chroma_v.size() * sizeof(float)) == 0);
        }
    }
}

TEST_CASE("pool_spatial basics") {
    const std::vector<double> constant{2, 2, 2, 2};
    auto r = pool_spatial(std::span<const double>(constant), {Stat::Mean, Stat::Std});
    CHECK(r[Stat::Mean] == 2.0);
    CHECK(r[Stat::Std] == 0.0);

    const std::vector<double> two{0, 4};
    r = pool_spatial(std::span<const double>(two), {Stat::Mean, Stat::Std});
    CHECK(r[Stat::Mean] == 2.0);
    CHECK(r[Stat::Std] == 2.0);

    CHECK_THROWS_AS(pool_spatial(std::span<const double>(), {Stat::Mean}), ValidationError);
    CHECK_THROWS_AS(pool_spatial(std::span<const double>(two), {Stat::Skew}), ValidationError);
}

TEST_CASE("pool_spatial matches a two-pass reference on random data") {
    oracles::TestRng rng(123);
    std::vector<double> v(1000);
    for (double& x : v) x = rng.uniform(-5.0, 5.0);
    const auto r = pool_spatial(std::span<const double>(v), {Stat::Mean, Stat::Std});
    const auto ref = oracles::reference_moments(v);
    CHECK(r.at(Stat::Mean) == doctest::Approx(ref.mean).epsilon(1e-9));
    CHECK(r.at(Stat::Std) == doctest::Approx(ref.stddev).epsilon(1e-9));
}

TEST_CASE("pool_temporal degenerate and closed-form cases") {
    const std::vector<double> constant{5, 5, 5};
    auto r = pool_temporal(std::span<const double>(constant),
                           {Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis});
    CHECK(r[Stat::Mean] == 5.0);
    CHECK(r[Stat::Std] == 0.0);
    CHECK(r[Stat::Skew] == 0.0);
    CHECK(r[Stat::Kurtosis] == 0.0);

    const std::vector<double> ramp{1, 2, 3};
    r = pool_temporal(std::span<const double>(ramp),
                      {Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis});
    CHECK(r[Stat::Mean] == doctest::Approx(2.0));
    CHECK(r[Stat::Std] == doctest::Approx(0.816496580927726));
    CHECK(r[Stat::Skew] == doctest::Approx(0.0));
    CHECK(r[Stat::Kurtosis] == doctest::Approx(-1.5));
}

TEST_CASE("pool_temporal matches the direct moment formulas on random series") {
    oracles::TestRng rng(321);
    std::vector<double> v(64);
    for (double& x : v) x = rng.uniform(0.0, 100.0);
    const auto r = pool_temporal(std::span<const double>(v),
                                 {Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis});
    const auto ref = oracles::reference_moments(v);
    CHECK(r.at(Stat::Mean) == doctest::Approx(ref.mean).epsilon(1e-9));
    CHECK(r.at(Stat::Std) == doctest::Approx(ref.stddev).epsilon(1e-9));
    CHECK(r.at(Stat::Skew) == doctest::Approx(ref.skew).epsilon(1e-9));
    CHECK(r.at(Stat::Kurtosis) == doctest::Approx(ref.kurtosis).epsilon(1e-9));
}

TEST_CASE("pooling is permutation invariant") {
    oracles::TestRng rng(55);
    std::vector<double> v(200);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    std::vector<double> shuffled = v;
    for (size_t i = shuffled.size(); i-- > 1;)
        std::swap(shuffled[i], shuffled[rng.uniform_int(0, static_cast<int>(i))]);

    const auto a = pool_temporal(std::span<const double>(v),
                                 {Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis});
    const auto b = pool_temporal(std::span<const double>(shuffled),
                                 {Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis});
    for (Stat s : {Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis})
        CHECK(a.at(s) == doctest::Approx(b.at(s)).epsilon(1e-12));
}

TEST_CASE("luma_differences") {
    SUBCASE("static clip gives all-zero planes") {
        const VideoClip clip = oracles::make_constant_clip(16, 16, 3, 8, 80, 128, 128);
        const auto diffs = luma_differences(clip);
        REQUIRE(diffs.size() == 2);
        for (const Plane& d : diffs) CHECK(mean_abs(d) == 0.0);
    }
    SUBCASE("constant offset shows up as a constant plane") {
        VideoClip clip = oracles::make_constant_clip(16, 16, 2, 8, 80, 128, 128);
        for (float& s : clip.frames[1].luma.samples) s += 3.0f;
        const auto diffs = luma_differences(clip);
        REQUIRE(diffs.size() == 1);
        for (float v : diffs[0].samples) CHECK(v == 3.0f);
        CHECK(mean_abs(diffs[0]) == 3.0);
    }
    SUBCASE("random clip matches element-wise subtraction") {
        const VideoClip clip = oracles::make_clip(16, 16, 3, 8, 99);
        const auto diffs = luma_differences(clip);
        REQUIRE(diffs.size() == 2);
        for (size_t f = 0; f < diffs.size(); ++f)
            for (size_t i = 0; i < diffs[f].size(); ++i)
                CHECK(diffs[f].samples[i] == clip.frames[f + 1].luma.samples[i] -
                                                 clip.frames[f].luma.samples[i]);
    }
    SUBCASE("difference planes telescope to last minus first") {
        const VideoClip clip = oracles::make_clip(12, 12, 5, 8, 7);
        const auto diffs = luma_differences(clip);
        for (size_t i = 0; i < clip.frames[0].luma.size(); ++i) {
            double acc = 0.0;
            for (const Plane& d : diffs) acc += d.samples[i];
            CHECK(acc == doctest::Approx(clip.frames[4].luma.samples[i] -
                                         clip.frames[0].luma.samples[i]));
        }
    }
    SUBCASE("single frame is an error") {
        VideoClip clip = oracles::make_constant_clip(16, 16, 1, 8, 80, 128, 128);
        CHECK_THROWS_AS(luma_differences(clip), ValidationError);
    }
}

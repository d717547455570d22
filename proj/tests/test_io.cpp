#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "hyperlap/io.hpp"

using namespace hyperlap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path d = fs::temp_directory_path() / "hyperlap_io_test";
    fs::create_directories(d);
    return d / name;
}

} // namespace

TEST(Io, FifteenDigitFormatting)
{
    EXPECT_EQ(io::fmt(1.0 / 3.0), "0.333333333333333");
    EXPECT_EQ(io::fmt(2.0), "2");
    EXPECT_EQ(io::fmt(std::nan("")), "nan");
    EXPECT_EQ(io::num(1.0 / 3.0).dump(), "0.333333333333333");
    EXPECT_TRUE(io::num(INFINITY).is_null());
}

TEST(Io, Fnv1aReferenceValues)
{
    EXPECT_EQ(io::fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(io::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(io::hex(0xabcULL), "0000000000000abc");
}

TEST(Io, ProfileRoundTripReproducesPohozaev)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 6.0, 0.0);
    IntegrationResult ir = integrate(1.0, P, default_ode_config(P));
    const fs::path path = scratch("traj.csv");
    io::write_profile_csv(path, ir.profile);
    RadialProfile back = io::read_profile_csv(path, P);
    ASSERT_EQ(back.size(), ir.profile.size());
    for (std::size_t i = 0; i < back.size(); ++i)
        EXPECT_NEAR(back.u[i], ir.profile.u[i], 1e-14 * std::abs(ir.profile.u[i]));
    for (double R : {2.0, 5.0, 10.0, 15.0}) {
        PohozaevReport a = pohozaev_residuals(ir.profile, R), b = pohozaev_residuals(back, R);
        EXPECT_LE(std::abs(a.res1 - b.res1), 1e-12 * a.scale1);
        EXPECT_LE(std::abs(a.res2 - b.res2), 1e-12 * a.scale2);
        EXPECT_LE(std::abs(a.contradiction_term - b.contradiction_term), 1e-12 * std::abs(a.contradiction_term));
    }
    // A second write of the re-read profile is byte-identical.
    EXPECT_EQ(io::profile_csv(back), io::profile_csv(ir.profile));
}

TEST(Io, ReadRejectsMalformedFiles)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 6.0, 0.0);
    io::write_text(scratch("bad_header.csv"), "x,y\n1,2\n");
    EXPECT_THROW(io::read_profile_csv(scratch("bad_header.csv"), P), io::IoError);
    io::write_text(scratch("bad_row.csv"), "t,u,du,flux\n0,1,0\n");
    EXPECT_THROW(io::read_profile_csv(scratch("bad_row.csv"), P), io::IoError);
    EXPECT_THROW(io::read_profile_csv(scratch("missing.csv"), P), io::IoError);
}

TEST(Io, ScanCsvLayout)
{
    ScanReport r;
    ScanRow a;
    a.alpha = 0.5;
    a.classification = Classification::slow;
    a.logderiv_tail = 0.01;
    ScanRow b;
    b.alpha = 5.0;
    b.classification = Classification::cross;
    b.cross_time = 1.25;
    r.rows = {a, b};
    EXPECT_EQ(io::scan_csv(r), "alpha,classification,cross_time,logderiv_tail\n0.5,SLOW,,0.01\n5,CROSS,1.25,0\n");
}

TEST(Io, ProvenanceHashDependsOnInputs)
{
    io::Json a = io::provenance("x", io::Json{{"k", 1}});
    io::Json b = io::provenance("x", io::Json{{"k", 2}});
    EXPECT_NE(a["input_hash"], b["input_hash"]);
    EXPECT_EQ(a["input_hash"], io::provenance("x", io::Json{{"k", 1}})["input_hash"]);
}

TEST(Io, TableAlignment)
{
    EXPECT_EQ(io::table({{"a", "bb"}, {"ccc", "d"}}), "a    bb\nccc  d\n");
}

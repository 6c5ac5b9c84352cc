#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "anyplace/object_model.hpp"
#include "anyplace/scene.hpp"
#include "anyplace/text_io.hpp"
#include "helpers.hpp"

namespace anyplace {
namespace {

namespace fs = std::filesystem;

TEST(TextIo, ShortestRoundTripDoubles)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(INFINITY), "inf");
    EXPECT_THROW(parse_double("1.5x"), FormatError);
}

TEST(TextIo, KeyValueFile)
{
    const auto kv = KeyValueFile::parse("# c\na = 1 2 3\nb = x\nb = y\n");
    EXPECT_EQ(kv.numbers("a", 3), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(kv.all("b").size(), 2u);
    EXPECT_THROW(kv.get("b"), FormatError);
    EXPECT_THROW(kv.get("zzz"), FormatError);
    EXPECT_THROW(kv.numbers("a", 2), FormatError);
    EXPECT_EQ(kv.get_or("zzz", "d"), "d");
}

TEST(Assets, MeshSetIsDeterministicAndWatertight)
{
    const auto a = generate_meshes(1);
    const auto b = generate_meshes(1);
    ASSERT_GE(a.size(), 30u);
    int test = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(to_obj(a[i].mesh), to_obj(b[i].mesh));
        EXPECT_NO_THROW(parse_obj(to_obj(a[i].mesh)));
        EXPECT_GT(a[i].mesh.volume, 0.0);
        test += a[i].split == "test";
    }
    EXPECT_EQ(test, static_cast<int>(a.size()) / 3);
}

TEST(Assets, EarClipHandlesConcavePolygons)
{
    const std::vector<Eigen::Vector2d> l{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    EXPECT_EQ(ear_clip(l).size(), 4u);
    EXPECT_NEAR(extrude_polygon(l, 0.5).volume, 1.5, 1e-12);
}

TEST(Assets, ShippedScenesAreValid)
{
    const fs::path dir = fs::path(ANYPLACE_ASSET_DIR) / "scenes";
    int count = 0;
    for (int i = 0; i < 10; ++i) {
        const fs::path p = dir / ("scene_" + std::to_string(i) + ".txt");
        ASSERT_TRUE(fs::exists(p)) << p;
        const SceneFile sf = load_scene(p);  // make_scene checks penetration
        EXPECT_GE(sf.scene.objects.size(), 5u);
        const auto again = load_scene(p);
        EXPECT_EQ(to_text(sf, dir), to_text(again, dir));
        ++count;
    }
    EXPECT_EQ(count, 10);
    EXPECT_NO_THROW(load_arm(fs::path(ANYPLACE_ASSET_DIR) / "arm6.txt"));
}

int run(const std::string& args)
{
    const std::string cmd = std::string(ANYPLACE_CLI) + " " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run("--version"), 0);
    EXPECT_EQ(run("no-such-command"), 1);
    EXPECT_EQ(run("solve"), 1);
    EXPECT_EQ(run("solve --scene /nonexistent/scene.txt"), 1);
    const fs::path dir = fs::path(ANYPLACE_ASSET_DIR) / "scenes";
    EXPECT_EQ(run("solve --scene " + (dir / "scene_0.txt").string() + " --goal-only --method es --budget 0"), 2);
    EXPECT_EQ(run("solve --scene " + (dir / "scene_5.txt").string() + " --method es --budget 0"), 0);
}

TEST(Cli, SeedFromEnvironmentAndProvenance)
{
    const fs::path tmp = fs::temp_directory_path() / "anyplace_cli_test";
    fs::create_directories(tmp);
    const std::string out = (tmp / "d.csv").string();
    ASSERT_EQ(run("collect-pce --samples 5 --out " + out), 0);
    const std::string a = read_file(out);
    ASSERT_EQ(std::system(("ANYPLACE_SEED=0 " + std::string(ANYPLACE_CLI) + " collect-pce --samples 5 --out " + out +
                           " > /dev/null 2>&1").c_str()),
              0);
    EXPECT_EQ(read_file(out), a);
    EXPECT_EQ(a.rfind("# anyplace ", 0), 0u);
    EXPECT_NE(a.find("--samples=5"), std::string::npos);
    EXPECT_NE(a.find("--seed=0"), std::string::npos);
    ASSERT_EQ(std::system(("ANYPLACE_SEED=5 " + std::string(ANYPLACE_CLI) + " collect-pce --samples 5 --out " + out +
                           " > /dev/null 2>&1").c_str()),
              0);
    EXPECT_NE(read_file(out), a);
    fs::remove_all(tmp);
}

}  // namespace
}  // namespace anyplace

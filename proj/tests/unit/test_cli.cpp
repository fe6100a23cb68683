#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("heliumjcm_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p;
    }
};

int run(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + " \"" HELIUMJCM_CLI "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* shifts_cfg = "task = shifts\n[field]\ne_perp = 15\nb_z = 0.65\n"
                         "[sweep]\naxis = b_y\nstart = 0.05\nstop = 0.2\npoints = 4\n";

} // namespace

TEST_CASE("exit code 0 and deterministic CSV") {
    Scratch s;
    const auto cfg = s.write("run.cfg", shifts_cfg);
    REQUIRE(run("shifts --config " + cfg.string() + " --out " + (s.dir / "a").string()) == 0);
    REQUIRE(run("shifts --config " + cfg.string() + " --out " + (s.dir / "b").string() + " --threads 3") == 0);
    const std::string a = slurp(s.dir / "a" / "run_shifts.csv");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(s.dir / "b" / "run_shifts.csv"));
    CHECK(fs::exists(s.dir / "a" / "run.json"));
}

TEST_CASE("output directory defaults to the environment variable") {
    Scratch s;
    const auto cfg = s.write("env.cfg", shifts_cfg);
    const fs::path out = s.dir / "from_env";
    REQUIRE(run("shifts --config " + cfg.string(), "HELIUMJCM_OUTPUT_DIR=" + out.string()) == 0);
    CHECK(fs::exists(out / "env_shifts.csv"));
}

TEST_CASE("exit code 2 for configuration errors") {
    Scratch s;
    CHECK(run("shifts --config " + s.write("bad.cfg", "[field]\nbogus = 1\n").string()) == 2);
    CHECK(run("shifts --config " + s.write("missing.cfg", "[field]\ne_perp = 15\n").string()) == 2);
    CHECK(run("rates --config " + s.write("mismatch.cfg", shifts_cfg).string()) == 2);
    CHECK(run("validate --config " + s.write("ok.cfg", shifts_cfg).string()) == 0);
}

TEST_CASE("exit code 3 writes a failure manifest") {
    Scratch s;
    // Sitting on the (2,1)/(3,0) crossing makes the perturbative shifts inapplicable.
    const auto cfg = s.write("res.cfg", "task = shifts\n[field]\ne_perp = 20\nb_z = 1.1408\n"
                                        "[sweep]\naxis = b_y\nstart = 0.1\nstop = 0.2\npoints = 3\n");
    CHECK(run("shifts --config " + cfg.string() + " --out " + s.dir.string()) == 3);
    CHECK(fs::exists(s.dir / "res_failures.json"));
}

TEST_CASE("exit code 4 when the self-test fails") {
    Scratch s;
    const auto coarse = s.write("coarse.cfg", "task = self-test\n[grid]\nn_points = 400\nextrapolate = false\n");
    CHECK(run("self-test --config " + coarse.string() + " --out " + s.dir.string()) == 4);
    const auto good = s.write("good.cfg", "task = self-test\n");
    CHECK(run("self-test --config " + good.string() + " --out " + s.dir.string()) == 0);
}

#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "hrs/config.hpp"
#include "hrs/error.hpp"

namespace testing_support {

// Compact valid configuration for unit tests.
inline hrs::SimConfig small_config() {
    hrs::SimConfig c;
    c.n_a = 50;
    c.n_b = 50;
    c.t_min_steps = 20;
    c.lattice_spacing = 1.0;
    c.spatial_extent = 60.0;
    c.detector_1_pos = {-2.0, 0.0, 0.0};
    c.detector_2_pos = {2.0, 0.0, 0.0};
    c.coincidence_radius = 2.0;
    c.tau_ticks = 1;
    c.seed = 1234;
    c.trials = 100;
    return c;
}

inline hrs::SimConfig fixture(const std::string& name) {
    return hrs::load_config(std::string(HRS_FIXTURES) + "/" + name);
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
};

// Runs a shell command, capturing stdout (and stderr when merge_stderr is set).
inline CommandResult run_command(const std::string& cmd, bool merge_stderr = false) {
    CommandResult r;
    FILE* pipe = popen((cmd + (merge_stderr ? " 2>&1" : " 2>/dev/null")).c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace testing_support

/** @file overtwisted_disk.cpp
 *  @brief Locates the overtwisted disk of the radial model with alpha = cos(r^2/2),
 *         beta = sin(r^2/2) and writes its boundary as CSV.
 *
 *  usage: demo_overtwisted_disk [out.csv]   (default: stdout)
 */
#include "srtight/tightness.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

int main(int argc, char** argv) {
    using namespace srtight;
    const Model m = builtin_model("overtwisted");

    AnalysisOptions opt;
    opt.n_z = 4;
    opt.n_theta = 16;
    opt.r_max = 3.0;
    const auto rep = analyze_orbit(m, opt);

    std::cerr << "r_o in [" << rep.r_o_minus.value_or(NAN) << ", " << rep.r_o_plus.value_or(NAN)
              << "], sqrt(2 pi) = " << std::sqrt(2 * std::numbers::pi) << '\n'
              << rep.conclusion << '\n';

    const auto disk = disk_boundary(m, 0.0, 64, opt);
    std::cerr << "closure defect " << disk.closure_defect << (disk.simple ? ", simple" : ", self-intersecting") << '\n';

    if (argc > 1) {
        std::ofstream out(argv[1]);
        write_disk_csv(out, disk);
    } else {
        write_disk_csv(std::cout, disk);
    }
}

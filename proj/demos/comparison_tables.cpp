/** @file comparison_tables.cpp
 *  @brief Prints the left-invariant comparison table and the overtwisted row
 *         as markdown.
 */
#include "srtight/riem_compare.hpp"

#include <iostream>

int main() {
    using namespace srtight;
    AnalysisOptions opt;
    opt.n_z = 2;
    opt.n_theta = 8;
    write_table_markdown(std::cout, kleft_table(opt));
    std::cout << '\n';
    write_table_markdown(std::cout, {ot_table(opt)});
}

// Acceptance criteria 1-10; one line per criterion, exit 0 iff all pass.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "zerotemp/verify/suites.hpp"

int main() {
    using namespace zerotemp::verify;
    const auto scratch = std::filesystem::temp_directory_path() / "zerotemp-acceptance";
    std::filesystem::remove_all(scratch);
    const std::vector<CriterionResult> results{
        criterion_closed_form_perron(), criterion_rate(),    criterion_maxplus_oracle(),
        criterion_cost_laws(),          criterion_walters_gamma(), criterion_limit_measures(),
        criterion_stability(),          criterion_selection_flip(),      criterion_calibration(),
        criterion_determinism(scratch)};
    std::filesystem::remove_all(scratch);
    std::size_t passed = 0;
    for (const auto& r : results) {
        std::cout << r.line() << '\n';
        passed += r.pass ? 1 : 0;
    }
    std::cout << passed << "/" << results.size() << " criteria pass\n";
    return passed == results.size() ? EXIT_SUCCESS : EXIT_FAILURE;
}

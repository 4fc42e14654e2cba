#pragma once

#include "dispersal/config.hpp"
#include "dispersal/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace dispersal {

enum ExitStatus : int { exit_ok = 0, exit_invalid = 2, exit_numerical = 3 };

/// Exit status for an error: 3 for numerical failures, 2 otherwise.
int exit_status_for(const Error& e);

/// Runs one experiment, writing its reports and `run.txt` into `out_dir`.
/// Errors are reported on `log` and mapped to exit statuses; nothing throws.
///
/// Files per experiment:
///   simulate    trajectory.csv (t, x[, y], value), final.dat
///   spectrum    spectrum.csv, eigenfunction.csv, eigenfunction.dat
///   kpp-orbit   orbit.csv, orbit_t0.dat
///   converge-a  convergence.csv, convergence.dat
///   converge-b  spectrum_report.csv, gaps.dat
///   converge-c  orbit_report.csv, gaps.dat
///   operator.coo  when dump_operator is set (single-operator experiments)
int run(const ExperimentConfig& config, const std::filesystem::path& out_dir, int jobs,
        std::ostream& log);

/// Loads the config, checks it matches `subcommand`, then runs it. `out_dir`
/// overrides the config's `output` key when nonempty.
int run_file(std::string_view subcommand, const std::string& config_path,
             const std::string& out_dir, int jobs, std::ostream& log);

}  // namespace dispersal

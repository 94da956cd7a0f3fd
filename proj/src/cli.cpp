#include "emcal/cli.hpp"

#include "emcal/anisotropy.hpp"
#include "emcal/calibration.hpp"
#include "emcal/diagnostics.hpp"
#include "emcal/io.hpp"
#include "emcal/seeding.hpp"
#include "emcal/synthetic.hpp"
#include "emcal/thickness.hpp"
#include "emcal/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace emcal {

namespace {

namespace fs = std::filesystem;

// Flags shared by the commands that read a stack.
struct StackArgs {
    std::vector<std::string> inputs;
    std::optional<double> dx, dy;
    std::optional<int> patch_px;
    std::optional<double> patch_um;
    int max_shift = 20;
    int positions = 20;
    std::uint64_t seed = 0;
    std::vector<std::size_t> calib_planes;
    std::string out = ".";
    std::string model;
};

void add_stack_flags(CLI::App* cmd, StackArgs& a, bool with_model) {
    cmd->add_option("--in", a.inputs, "Input images or glob patterns (natural filename order)");
    cmd->add_option("--dx", a.dx, "Pixel size along X in nm")->check(CLI::PositiveNumber);
    cmd->add_option("--dy", a.dy, "Pixel size along Y in nm")->check(CLI::PositiveNumber);
    auto* px = cmd->add_option("--patch-px", a.patch_px, "Square patch edge in pixels")->check(CLI::PositiveNumber);
    cmd->add_option("--patch-um", a.patch_um, "Square patch edge in micrometres (default 7)")
        ->check(CLI::PositiveNumber)
        ->excludes(px);
    cmd->add_option("--max-shift", a.max_shift, "Largest in-plane shift in pixels")->capture_default_str();
    cmd->add_option("--positions", a.positions, "Patch positions per shift or section pair")->capture_default_str();
    cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    cmd->add_option("--calib-planes", a.calib_planes, "Plane indices used for calibration (default all)")
        ->delimiter(',');
    cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
    if (with_model) cmd->add_option("--model", a.model, "calibration.json from a previous calibrate run");
}

CalibrationConfig make_config(const StackArgs& a) {
    CalibrationConfig cfg;
    cfg.max_shift_px = a.max_shift;
    cfg.positions_per_shift = a.positions;
    cfg.seed = a.seed;
    cfg.calibration_planes = a.calib_planes;
    if (a.patch_px) {
        cfg.patch_w_px = *a.patch_px;
        cfg.patch_h_px = *a.patch_px;
    }
    if (a.patch_um) cfg.patch_um = *a.patch_um;
    cfg.validate();
    return cfg;
}

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

ImageStack read_stack(const StackArgs& a, const std::optional<Resolution>& fallback = std::nullopt) {
    if (a.inputs.empty()) throw UsageError("--in is required");
    double dx = 0, dy = 0;
    if (a.dx && a.dy) {
        dx = *a.dx;
        dy = *a.dy;
    } else if (!a.dx && !a.dy && fallback) {
        dx = fallback->dx();
        dy = fallback->dy();
    } else {
        throw UsageError("--dx and --dy are required (image metadata is not used for resolution)");
    }
    const auto paths = io::expand_inputs(a.inputs);
    if (fallback && (fallback->dx() != dx || fallback->dy() != dy)) {
        warn("stack resolution differs from the model's calibration resolution");
    }
    return io::load_stack(paths, dx, dy);
}

std::optional<io::CalibrationFile> maybe_model(const StackArgs& a) {
    if (a.model.empty()) return std::nullopt;
    return io::load_calibration(a.model);
}

void report_written(std::ostream& out, const std::vector<fs::path>& paths) {
    for (const auto& p : paths) out << "wrote " << p.string() << '\n';
}

fs::path ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io::IoError("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

std::string padded(std::size_t i, std::size_t count) {
    const auto width = std::max<std::size_t>(3, std::to_string(count).size());
    std::ostringstream os;
    os << std::setw(static_cast<int>(width)) << std::setfill('0') << i;
    return os.str();
}

std::vector<double> parse_angles(const std::string& text) {
    std::vector<double> angles;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            angles.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--angles: cannot parse '" + item + "'");
        }
    }
    return angles;
}

int run_calibrate(const StackArgs& a, std::ostream& out) {
    const auto cfg = make_config(a);
    const auto stack = read_stack(a);
    const auto result = calibrate(stack, cfg);
    const auto dir = ensure_dir(a.out);
    io::ReportSet reports;
    reports.calibration = io::make_calibration_file(result, stack.resolution(), cfg);
    reports.anisotropy = result.gamma;
    auto written = io::write_reports(reports, dir, out);
    for (const auto* reg : {&result.fx, &result.fy}) {
        const std::string tag = reg->axis == Axis::X ? "x" : "y";
        io::emit_distance_dissimilarity_plot(reg->model, reg->dataset, dir / ("curve_" + tag + ".svg"));
        written.push_back(dir / ("curve_" + tag + ".svg"));
        io::write_file_atomic(dir / ("dataset_" + tag + ".csv"), io::dataset_csv(reg->dataset));
        written.push_back(dir / ("dataset_" + tag + ".csv"));
    }
    report_written(out, written);
    out << "gamma_yx " << io::format_double(result.gamma_yx()) << ", regressor axis " << to_string(result.chosen_axis)
        << '\n';
    return kExitOk;
}

int run_thickness(const StackArgs& a, const std::string& axis_flag, std::ostream& out) {
    if (a.inputs.empty()) throw UsageError("thickness needs --in (and optionally --model)");
    const auto cfg = make_config(a);
    const auto model = maybe_model(a);
    const auto stack = read_stack(a, model ? std::optional<Resolution>(model->fx.resolution) : std::nullopt);

    ThicknessReport report;
    if (model) {
        const Axis axis = axis_flag == "auto" ? model->chosen_axis : axis_from_string(axis_flag);
        report = estimate_stack_thickness(stack, model->model(axis).model, cfg);
        report.axis_used = axis;
        report.gamma_yx = model->gamma.gamma_yx;
    } else {
        auto calibration = calibrate(stack, cfg);
        if (axis_flag != "auto") calibration.chosen_axis = axis_from_string(axis_flag);
        report = estimate_stack_thickness(stack, calibration, cfg);
    }
    io::ReportSet reports;
    reports.thickness = report;
    report_written(out, io::write_reports(reports, ensure_dir(a.out), out));
    out << "mean thickness " << io::format_double(report.mean_nm) << " nm, std " << io::format_double(report.std_nm)
        << " nm over " << report.estimates.size() << " pairs (axis " << to_string(report.axis_used) << ")\n";
    return kExitOk;
}

int run_anisotropy(const StackArgs& a, std::ostream& out) {
    const auto cfg = make_config(a);
    const auto model = maybe_model(a);
    const auto stack = read_stack(a, model ? std::optional<Resolution>(model->fx.resolution) : std::nullopt);
    const auto planes = select_calibration_planes(stack, cfg);
    const auto gamma = model ? estimate_gamma(model->fx.model, planes, cfg) : gamma_for_planes(planes, cfg);
    io::ReportSet reports;
    reports.anisotropy = gamma;
    report_written(out, io::write_reports(reports, ensure_dir(a.out), out));
    out << "gamma_yx " << io::format_double(gamma.gamma_yx) << " (std " << io::format_double(gamma.std)
        << "), n_hat_yx " << io::format_double(gamma.n_hat_yx) << '\n';
    return kExitOk;
}

int run_rotation_scan(const StackArgs& a, const std::optional<std::string>& angles_text, std::ostream& out) {
    const auto cfg = make_config(a);
    const auto stack = read_stack(a);
    const auto angles = angles_text ? parse_angles(*angles_text) : default_scan_angles();
    io::ReportSet reports;
    reports.rotation = angles.empty() ? RotationScan{} : rotation_scan(stack, angles, cfg);
    report_written(out, io::write_reports(reports, ensure_dir(a.out), out));
    if (!reports.rotation->empty()) {
        out << "minimum gamma_yx " << io::format_double(reports.rotation->gamma_star) << " at "
            << io::format_double(reports.rotation->angle_star) << " deg\n";
    }
    return kExitOk;
}

int run_size_sweep(const StackArgs& a, const std::vector<int>& sizes, std::ostream& out) {
    if (sizes.empty()) throw UsageError("--sizes is required");
    for (int s : sizes) {
        if (s < 1) throw UsageError("--sizes: patch sizes must be positive");
    }
    const auto cfg = make_config(a);
    const auto model = maybe_model(a);
    const auto stack = read_stack(a, model ? std::optional<Resolution>(model->fx.resolution) : std::nullopt);
    const auto sweep = model ? size_sweep(stack, model->model(model->chosen_axis).model, cfg, sizes)
                             : size_sweep(stack, cfg, sizes);
    const auto path = ensure_dir(a.out) / "size_sweep.csv";
    io::write_file_atomic(path, io::size_sweep_csv(sweep));
    report_written(out, {path});
    return kExitOk;
}

struct SynthArgs {
    std::string out;
    std::uint64_t seed = 0;
    PatternConfig pattern;
    double compress = 1.0;
    double rotate = 0.0;
    int count = 1;
    VolumeConfig volume;
    int spacing = 1;
};

int run_synth_pattern(const SynthArgs& s, std::ostream& out) {
    if (s.count < 1) throw UsageError("--count must be at least 1");
    const auto dir = ensure_dir(s.out);
    std::vector<fs::path> written;
    for (int i = 0; i < s.count; ++i) {
        PatternConfig pc = s.pattern;
        pc.seed = s.count == 1 ? s.seed : derive_seed(s.seed, {static_cast<std::uint64_t>(i)});
        auto plane = gen_radial_pattern(pc);
        if (s.compress != 1.0) plane = compress_y(plane, s.compress);
        if (s.rotate != 0.0) plane = rotate_plane(plane, s.rotate);
        const auto path = dir / ("pattern_" + padded(static_cast<std::size_t>(i), static_cast<std::size_t>(s.count)) + ".png");
        io::write_png16(path, plane);
        written.push_back(path);
    }
    report_written(out, written);
    return kExitOk;
}

int write_slices(const ImageStack& stack, const fs::path& dir, const std::string& prefix, std::ostream& out) {
    for (std::size_t i = 0; i < stack.size(); ++i) {
        io::write_png16(dir / (prefix + padded(i, stack.size()) + ".png"), stack[i]);
    }
    out << "wrote " << stack.size() << " planes to " << dir.string() << " (nominal spacing "
        << io::format_double(*stack.nominal_spacing_nm()) << " nm)\n";
    return kExitOk;
}

int run_synth_volume(const SynthArgs& s, std::ostream& out) {
    VolumeConfig vc = s.volume;
    vc.seed = s.seed;
    return write_slices(slice_volume(gen_isotropic_volume(vc), 1), ensure_dir(s.out), "z", out);
}

int run_synth_stack(const SynthArgs& s, std::ostream& out) {
    VolumeConfig vc = s.volume;
    vc.seed = s.seed;
    return write_slices(slice_volume(gen_isotropic_volume(vc), s.spacing), ensure_dir(s.out), "sec", out);
}

int run_validate(std::uint64_t seed, const std::vector<std::string>& only, std::ostream& out) {
    ValidationOptions opts;
    opts.seed = seed;
    opts.only = only;
    const auto results = run_validation(opts, &out);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    out << (failed == 0 ? "all " + std::to_string(results.size()) + " criteria passed"
                        : std::to_string(failed) + " of " + std::to_string(results.size()) + " criteria failed")
        << '\n';
    return failed == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Section thickness and in-plane anisotropy estimation for serial-section images", "emcal"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", "emcal 1.0");

    StackArgs stack_args;
    std::string axis_flag = "auto";
    std::optional<std::string> angles_text;
    std::vector<int> sizes;
    SynthArgs synth;
    std::uint64_t validate_seed = 7;
    std::vector<std::string> only;

    auto* calibrate_cmd = app.add_subcommand("calibrate", "Learn the distance-dissimilarity regressors of a stack");
    add_stack_flags(calibrate_cmd, stack_args, false);

    auto* thickness_cmd = app.add_subcommand("thickness", "Estimate the thickness of every section");
    add_stack_flags(thickness_cmd, stack_args, true);
    thickness_cmd->add_option("--axis", axis_flag, "Regressor axis")
        ->check(CLI::IsMember({"auto", "x", "y"}))
        ->capture_default_str();

    auto* anisotropy_cmd = app.add_subcommand("anisotropy", "Estimate the in-plane stretching coefficient");
    add_stack_flags(anisotropy_cmd, stack_args, true);

    auto* rotation_cmd = app.add_subcommand("rotation-scan", "Estimate gamma over rotated copies of the images");
    add_stack_flags(rotation_cmd, stack_args, false);
    rotation_cmd->add_option("--angles", angles_text, "Comma-separated angles in degrees (default 0,10,...,170)");

    auto* sweep_cmd = app.add_subcommand("size-sweep", "Thickness statistics over square patch sizes");
    add_stack_flags(sweep_cmd, stack_args, true);
    sweep_cmd->add_option("--sizes", sizes, "Comma-separated patch edges in pixels")->delimiter(',');

    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic fixtures");
    synth_cmd->require_subcommand(1);
    auto* pattern_cmd = synth_cmd->add_subcommand("pattern", "Radial-gradient disk pattern(s) as 16-bit PNG");
    auto* volume_cmd = synth_cmd->add_subcommand("volume", "Isotropic volume written as every z plane");
    auto* stack_cmd = synth_cmd->add_subcommand("stack", "Isotropic volume sliced every --spacing voxels");
    for (auto* cmd : {pattern_cmd, volume_cmd, stack_cmd}) {
        cmd->add_option("--out", synth.out, "Output directory")->required();
        cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    }
    pattern_cmd->add_option("--width", synth.pattern.width_px)->capture_default_str();
    pattern_cmd->add_option("--height", synth.pattern.height_px)->capture_default_str();
    pattern_cmd->add_option("--disks", synth.pattern.disk_count)->capture_default_str();
    pattern_cmd->add_option("--rmin", synth.pattern.radius_min_px, "Smallest disk radius in pixels")
        ->capture_default_str();
    pattern_cmd->add_option("--rmax", synth.pattern.radius_max_px, "Largest disk radius in pixels")
        ->capture_default_str();
    pattern_cmd->add_option("--compress", synth.compress, "Y compression factor in (0,1]")->capture_default_str();
    pattern_cmd->add_option("--rotate", synth.rotate, "Rotation in degrees after compression")
        ->capture_default_str();
    pattern_cmd->add_option("--count", synth.count, "Number of independent patterns")->capture_default_str();
    for (auto* cmd : {volume_cmd, stack_cmd}) {
        cmd->add_option("--size", synth.volume.nx, "Edge length in voxels (cubic)")->capture_default_str();
        cmd->add_option("--smoothing", synth.volume.smoothing_voxels, "Gaussian smoothing scale in voxels")
            ->capture_default_str();
        cmd->add_option("--voxel-nm", synth.volume.voxel_nm, "Voxel size in nm")->capture_default_str();
    }
    stack_cmd->add_option("--spacing", synth.spacing, "Slice spacing in voxels")->capture_default_str();

    auto* validate_cmd = app.add_subcommand("validate", "Run the synthetic acceptance suite");
    validate_cmd->add_option("--seed", validate_seed, "Base seed")->capture_default_str();
    validate_cmd->add_option("--only", only, "Run only these criteria")
        ->delimiter(',')
        ->check(CLI::IsMember(criterion_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::ostream* previous = set_warning_stream(&err);
    struct Restore {
        std::ostream* s;
        ~Restore() { set_warning_stream(s); }
    } restore{previous};

    auto usage = [&](const CLI::App* cmd, const std::string& msg) {
        err << "error: " << msg << "\n\n" << cmd->help();
        return kExitUsage;
    };

    const CLI::App* active = app.get_subcommands().front();
    try {
        if (calibrate_cmd->parsed()) return run_calibrate(stack_args, out);
        if (thickness_cmd->parsed()) {
            if (stack_args.inputs.empty()) return usage(thickness_cmd, "thickness needs --in (and optionally --model)");
            return run_thickness(stack_args, axis_flag, out);
        }
        if (anisotropy_cmd->parsed()) return run_anisotropy(stack_args, out);
        if (rotation_cmd->parsed()) return run_rotation_scan(stack_args, angles_text, out);
        if (sweep_cmd->parsed()) return run_size_sweep(stack_args, sizes, out);
        if (pattern_cmd->parsed()) return run_synth_pattern(synth, out);
        if (volume_cmd->parsed() || stack_cmd->parsed()) {
            synth.volume.ny = synth.volume.nz = synth.volume.nx;
            return volume_cmd->parsed() ? run_synth_volume(synth, out) : run_synth_stack(synth, out);
        }
        if (validate_cmd->parsed()) return run_validate(validate_seed, only, out);
    } catch (const UsageError& e) {
        const CLI::App* leaf = active;
        while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
        return usage(leaf, e.what());
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace emcal

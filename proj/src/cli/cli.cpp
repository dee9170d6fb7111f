#include "srforge/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include "srforge/checkpoint.hpp"
#include "srforge/dataset.hpp"
#include "srforge/degradation.hpp"
#include "srforge/image_io.hpp"
#include "srforge/parallel.hpp"
#include "srforge/protocol.hpp"
#include "srforge/training.hpp"

namespace srforge {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKnownSections{"train", "stage1", "stage2", "final", "eval", "generator", "discriminator"};

struct Common {
    std::uint64_t seed = 0;
    std::string config;
    int threads = 0;

    [[nodiscard]] std::optional<int> thread_request() const {
        return threads > 0 ? std::optional<int>(threads) : std::nullopt;
    }
    [[nodiscard]] IniConfig ini() const { return config.empty() ? IniConfig{} : IniConfig::load(config); }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
    cmd->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--threads", c.threads, "Worker threads (default: SRFORGE_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
}

/// Rejects keys in sections no command understands.
void reject_unknown_sections(const IniConfig& ini) {
    for (const std::string& key : ini.unused_keys()) {
        const std::string section = key.substr(0, key.find('.'));
        if (!kKnownSections.contains(section)) throw ConfigError("config: unknown section [" + section + "] (" + key + ")");
    }
}

GeneratorConfig generator_from_ini(const IniConfig& ini, GeneratorConfig g) {
    const std::string s = "generator";
    g.in_channels = ini.get_int(s, "in_channels", g.in_channels);
    g.out_channels = ini.get_int(s, "out_channels", g.out_channels);
    g.num_features = ini.get_int(s, "num_features", g.num_features);
    g.num_rrdb_blocks = ini.get_int(s, "num_rrdb_blocks", g.num_rrdb_blocks);
    g.growth_channels = ini.get_int(s, "growth_channels", g.growth_channels);
    g.scale = ini.get_int(s, "scale", g.scale);
    g.residual_beta = ini.get_double(s, "residual_beta", g.residual_beta);
    for (const std::string& key : ini.unused_keys()) {
        if (key.rfind(s + ".", 0) == 0) throw ConfigError("generator config: unknown key " + key);
    }
    g.validate();
    return g;
}

DiscriminatorConfig discriminator_from_ini(const IniConfig& ini, DiscriminatorConfig d) {
    const std::string s = "discriminator";
    d.in_channels = ini.get_int(s, "in_channels", d.in_channels);
    d.num_features = ini.get_int(s, "num_features", d.num_features);
    d.spectral_norm_iterations = ini.get_int(s, "spectral_norm_iterations", d.spectral_norm_iterations);
    for (const std::string& key : ini.unused_keys()) {
        if (key.rfind(s + ".", 0) == 0) throw ConfigError("discriminator config: unknown key " + key);
    }
    d.validate();
    return d;
}

void require_distinct(const fs::path& input, const fs::path& output) {
    if (fs::exists(output) && fs::equivalent(input, output)) {
        throw std::invalid_argument("output directory must differ from the input directory");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    atomic_write(path, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::vector<double> parse_scales(const std::string& text) {
    std::vector<double> scales;
    try {
        scales = parse_double_list(text);
    } catch (const ConfigError&) {
        throw ConfigError("--scales expects a comma-separated list of numbers, got '" + text + "'");
    }
    if (scales.empty()) throw ConfigError("--scales is empty");
    return scales;
}

std::shared_ptr<spdlog::logger> stderr_logger() {
    static std::once_flag once;
    static std::shared_ptr<spdlog::logger> logger;
    std::call_once(once, [] {
        logger = spdlog::stderr_color_mt("srforge");
        logger->set_pattern("%^%l%$: %v");
    });
    return logger;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    spdlog::set_default_logger(stderr_logger());

    CLI::App app{"Super-resolution fine-tuning and evaluation toolkit", "srforge"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    // prepare
    Common prep_c;
    std::string prep_in, prep_out, prep_scales;
    auto* prep = app.add_subcommand("prepare", "Write multi-scale ground-truth copies of every PNG");
    add_common(prep, prep_c);
    prep->add_option("--input", prep_in, "Source image directory")->required()->check(CLI::ExistingDirectory);
    prep->add_option("--output", prep_out, "Destination directory")->required();
    prep->add_option("--scales", prep_scales, "Comma-separated scales in (0, 1] (default 1,0.75,0.5,1/3,0.25)");

    // degrade
    Common deg_c;
    std::string deg_in, deg_out;
    int deg_scale = 0;
    auto* deg = app.add_subcommand("degrade", "Synthesize LR images with the random degradation pipeline");
    add_common(deg, deg_c);
    deg->add_option("--input", deg_in, "HR image directory")->required()->check(CLI::ExistingDirectory);
    deg->add_option("--output", deg_out, "LR output directory")->required();
    deg->add_option("--scale", deg_scale, "Downscale factor (overrides [final] output_scale)")->check(CLI::PositiveNumber);

    // finetune
    Common ft_c;
    std::string ft_ckpt, ft_data, ft_out, ft_log, ft_features;
    std::optional<int> ft_iterations;
    std::optional<double> ft_epochs;
    bool ft_restart = false;
    auto* ft = app.add_subcommand("finetune", "Fine-tune a generator checkpoint on a directory of HR images");
    add_common(ft, ft_c);
    ft->add_option("--checkpoint", ft_ckpt, "Input checkpoint")->required()->check(CLI::ExistingFile);
    ft->add_option("--data", ft_data, "HR training image directory")->required()->check(CLI::ExistingDirectory);
    ft->add_option("--output", ft_out, "Output checkpoint")->required();
    auto* iter_opt = ft->add_option("--iterations", ft_iterations, "Total iterations (overrides the config)")
                         ->check(CLI::NonNegativeNumber);
    ft->add_option("--epochs", ft_epochs, "Derive total iterations from epochs over the dataset")
        ->check(CLI::PositiveNumber)
        ->excludes(iter_opt);
    ft->add_option("--log", ft_log, "Per-iteration log file (default: standard error)");
    ft->add_option("--feature-weights", ft_features, "Checkpoint with features.* perceptual weights")
        ->check(CLI::ExistingFile);
    ft->add_flag("--restart", ft_restart, "Ignore training state stored in the input checkpoint");

    // upscale
    Common up_c;
    std::string up_ckpt, up_in, up_out;
    int up_scale = 0;
    auto* up = app.add_subcommand("upscale", "Run a generator checkpoint over a directory");
    add_common(up, up_c);
    up->add_option("--checkpoint", up_ckpt, "Generator checkpoint (EMA weights used when present)")
        ->required()
        ->check(CLI::ExistingFile);
    up->add_option("--input", up_in, "LR image directory")->required()->check(CLI::ExistingDirectory);
    up->add_option("--output", up_out, "SR output directory")->required();
    up->add_option("--scale", up_scale, "Expected model scale")->check(CLI::PositiveNumber);

    // evaluate
    Common ev_c;
    std::string ev_ckpt, ev_in, ev_out, ev_protocol = "drive";
    bool ev_bicubic = false;
    auto* ev = app.add_subcommand("evaluate", "Score a model under a fixed degradation protocol");
    add_common(ev, ev_c);
    auto* ev_ck = ev->add_option("--checkpoint", ev_ckpt, "Generator checkpoint")->check(CLI::ExistingFile);
    auto* ev_bi = ev->add_flag("--bicubic", ev_bicubic, "Score bicubic interpolation instead of a model");
    ev_ck->excludes(ev_bi);
    ev->add_option("--protocol", ev_protocol, "drive, nih or custom")
        ->check(CLI::IsMember({"drive", "nih", "custom"}))
        ->capture_default_str();
    ev->add_option("--input", ev_in, "Ground-truth image directory")->required()->check(CLI::ExistingDirectory);
    ev->add_option("--output", ev_out, "Report file (default: standard output)");

    // inspect-checkpoint
    Common in_c;
    std::string in_path;
    auto* insp = app.add_subcommand("inspect-checkpoint", "Print a checkpoint manifest");
    add_common(insp, in_c);
    insp->add_option("checkpoint", in_path, "Checkpoint file")->required()->check(CLI::ExistingFile);

    // init
    Common init_c;
    std::string init_out;
    int init_scale = 0;
    auto* init = app.add_subcommand("init", "Write a freshly initialized generator and discriminator");
    add_common(init, init_c);
    init->add_option("--output", init_out, "Output checkpoint")->required();
    init->add_option("--scale", init_scale, "Generator scale (overrides [generator] scale)")
        ->check(CLI::IsMember({1, 2, 4}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0) err << app.help();
        return code;
    }

    try {
        if (*prep) {
            reject_unknown_sections(prep_c.ini());
            require_distinct(prep_in, prep_out);
            const auto scales = prep_scales.empty() ? default_multiscale_scales() : parse_scales(prep_scales);
            const DatasetManifest m = prepare_multiscale(prep_in, prep_out, scales, prep_c.thread_request());
            out << "prepare: " << m.entries.size() << " outputs from " << m.entries.size() / scales.size()
                << " images at " << scales.size() << " scales, " << m.skipped.size() << " skipped, 0 errors\n";
            return 0;
        }
        if (*deg) {
            const IniConfig ini = deg_c.ini();
            DegradationConfig cfg = DegradationConfig::from_ini(ini);
            reject_unknown_sections(ini);
            if (deg_scale > 0) cfg.output_scale = deg_scale;
            cfg.validate();
            require_distinct(deg_in, deg_out);
            fs::create_directories(deg_out);
            const auto files = list_images(deg_in);
            if (files.empty()) throw std::runtime_error("degrade: no PNG files in " + deg_in);
            std::vector<std::string> records(files.size()), errors(files.size());
            parallel_for(files.size(), resolve_threads(deg_c.thread_request()), [&](std::size_t i) {
                try {
                    SeededRng rng = SeededRng::for_item(deg_c.seed, i);
                    const DegradeResult r = degrade(read_image(files[i]), cfg, rng);
                    write_image(r.image, fs::path(deg_out) / files[i].filename());
                    records[i] = r.record.to_line();
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            });
            std::string table;
            int failed = 0;
            for (std::size_t i = 0; i < files.size(); ++i) {
                if (!errors[i].empty()) {
                    spdlog::error("{}: {}", files[i].filename().string(), errors[i]);
                    ++failed;
                    continue;
                }
                table += files[i].filename().string() + "\t" + records[i] + "\n";
            }
            write_text(fs::path(deg_out) / "degradations.tsv", table);
            out << "degrade: " << files.size() - static_cast<std::size_t>(failed) << " of " << files.size()
                << " images at x" << cfg.output_scale << ", seed " << deg_c.seed << ", " << failed << " errors\n";
            return failed == 0 ? 0 : 1;
        }
        if (*ft) {
            const IniConfig ini = ft_c.ini();
            TrainConfig cfg = TrainConfig::from_ini(ini);
            FinetuneOptions options;
            options.degradation = DegradationConfig::from_ini(ini);
            options.discriminator = discriminator_from_ini(ini, DiscriminatorConfig{});
            reject_unknown_sections(ini);
            if (!ini.raw("train", "seed")) cfg.seed = ft_c.seed;
            if (ft->count("--seed") > 0) cfg.seed = ft_c.seed;
            if (!ini.raw("final", "output_scale")) {
                const Checkpoint head = load_checkpoint(ft_ckpt);
                if (head.meta.generator) options.degradation.output_scale = head.meta.generator->scale;
            }
            if (ft_iterations) cfg.total_iterations = *ft_iterations;
            if (ft_epochs) cfg.total_iterations = plan_schedule(static_cast<int>(list_images(ft_data).size()), cfg.batch_size, *ft_epochs);
            cfg.validate();
            options.restart = ft_restart;
            options.threads = ft_c.thread_request();
            if (!ft_features.empty()) options.feature_weights = ft_features;
            std::ofstream log_file;
            if (!ft_log.empty()) {
                log_file.open(ft_log, std::ios::app);
                if (!log_file) throw std::runtime_error("cannot open log file " + ft_log);
                options.log = &log_file;
            } else {
                options.log = &err;
            }
            const FinetuneSummary s = finetune(ft_ckpt, ft_data, cfg, options, ft_out);
            out << "finetune: iterations " << s.start_iteration << " -> " << s.end_iteration << " (" << s.iterations_run
                << " run), l1 " << s.last.l1 << ", perceptual " << s.last.perceptual << ", gan_g " << s.last.gan_g
                << ", d " << s.last.d << ", saved " << ft_out << ", 0 errors\n";
            return 0;
        }
        if (*up) {
            reject_unknown_sections(up_c.ini());
            int scale = 0;
            const Upscaler model = checkpoint_upscaler(up_ckpt, &scale);
            if (up_scale > 0 && up_scale != scale) {
                throw ConfigError("checkpoint scale is " + std::to_string(scale) + ", --scale asked for " +
                                  std::to_string(up_scale));
            }
            require_distinct(up_in, up_out);
            fs::create_directories(up_out);
            const auto files = list_images(up_in);
            if (files.empty()) throw std::runtime_error("upscale: no PNG files in " + up_in);
            std::vector<std::string> errors(files.size());
            parallel_for(files.size(), resolve_threads(up_c.thread_request()), [&](std::size_t i) {
                try {
                    write_image(model(read_image(files[i])), fs::path(up_out) / files[i].filename());
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            });
            int failed = 0;
            for (std::size_t i = 0; i < files.size(); ++i) {
                if (errors[i].empty()) continue;
                spdlog::error("{}: {}", files[i].filename().string(), errors[i]);
                ++failed;
            }
            out << "upscale: " << files.size() - static_cast<std::size_t>(failed) << " of " << files.size()
                << " images at x" << scale << ", " << failed << " errors\n";
            return failed == 0 ? 0 : 1;
        }
        if (*ev) {
            if (ev_ckpt.empty() && !ev_bicubic) throw CLI::RequiredError("--checkpoint or --bicubic");
            const IniConfig ini = ev_c.ini();
            const EvalProtocol protocol = EvalProtocol::from_ini(ini, protocol_by_name(ev_protocol));
            reject_unknown_sections(ini);
            const EvalReport report =
                ev_bicubic ? run_protocol(bicubic_upscaler(protocol.upscale), "bicubic", ev_in, protocol, ev_c.thread_request())
                           : run_protocol(ev_ckpt, ev_in, protocol, ev_c.thread_request());
            const std::string text = format_report(report);
            if (ev_out.empty()) {
                out << text;
            } else {
                write_text(ev_out, text);
            }
            out << "evaluate: " << protocol.name << ", " << report.per_image.size() << " images, PSNR "
                << format_metric(report.mean_psnr, 2) << " / SSIM " << format_metric(report.mean_ssim, 4) << ", "
                << report.skipped.size() << " skipped, 0 errors\n";
            return 0;
        }
        if (*insp) {
            reject_unknown_sections(in_c.ini());
            const Checkpoint c = load_checkpoint(in_path);
            out << checkpoint_manifest_text(in_path) << "\n";
            std::size_t values = 0;
            for (const auto& [name, t] : c.tensors) values += t.numel();
            out << "inspect-checkpoint: " << c.tensors.size() << " tensors, " << values << " values, iteration "
                << c.meta.iteration << ", 0 errors\n";
            return 0;
        }
        if (*init) {
            const IniConfig ini = init_c.ini();
            GeneratorConfig g = generator_from_ini(ini, GeneratorConfig{});
            const DiscriminatorConfig d = discriminator_from_ini(ini, DiscriminatorConfig{});
            reject_unknown_sections(ini);
            if (init_scale > 0) g.scale = init_scale;
            g.validate();
            const Generator<float> gen(g, SeededRng::derive_seed(init_c.seed, 0));
            const Discriminator<float> disc(d, SeededRng::derive_seed(init_c.seed, 1));
            Checkpoint c;
            c.meta.generator = g;
            c.meta.discriminator = d;
            export_model(gen, c);
            export_model(disc, c);
            save_checkpoint(c, init_out);
            out << "init: generator " << count_params(gen) << " parameters, discriminator " << count_params(disc)
                << " parameters, saved " << init_out << ", 0 errors\n";
            return 0;
        }
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace srforge

// Command-line front end: denoise / noise / psnr / bench / verify.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plr/denoise.hpp"
#include "plr/image.hpp"
#include "plr/metrics.hpp"
#include "plr/verify.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Exit code contract: 0 success, 1 empty work, 2 usage, 3 I/O, 4 computation.
constexpr int kOk = 0;
constexpr int kEmpty = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kCompute = 4;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// "20" for integral values, "12.5" otherwise; used in filenames and CSV.
std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

struct DenoiseFlags {
  std::string input;
  std::string output;
  double sigma = 0.0;
  int patch_size = 7;
  int window = 35;
  int group_size = 0;  // 0 = default 5*d^2
  double t_factor = 1.5;
  int stride = 0;  // 0 = patch size
  std::string path = "pca";
  int threads = 0;  // 0 = hardware concurrency

  plr::denoise::DenoiseParams params() const {
    plr::denoise::DenoiseParams p;
    p.patch_size = patch_size;
    p.window = window;
    p.group_size = group_size > 0 ? group_size : 5 * patch_size * patch_size;
    p.sigma = sigma;
    p.t_factor = t_factor;
    p.stride = stride > 0 ? stride : patch_size;
    p.path = path == "svd" ? plr::denoise::Path::kSvd : plr::denoise::Path::kPca;
    return p;
  }
};

int run_denoise(const DenoiseFlags& flags) {
  const auto noisy = plr::image::load_pgm(flags.input);
  const auto start = Clock::now();
  const auto restored = plr::denoise::denoise_image(noisy, flags.params(), flags.threads);
  const double elapsed = seconds_since(start);
  plr::image::save_pgm(flags.output, restored);
  std::cout << flags.input << " -> " << flags.output << " (" << restored.width() << "x"
            << restored.height() << ") in " << format_number(elapsed) << " s\n";
  return kOk;
}

int run_noise(const std::string& input, const std::string& output, double sigma,
              std::uint64_t seed) {
  const auto clean = plr::image::load_pgm(input);
  plr::image::save_pgm(output, plr::metrics::add_gaussian_noise(clean, {sigma, seed}));
  return kOk;
}

int run_psnr(const std::string& a_path, const std::string& b_path) {
  const auto a = plr::image::load_pgm(a_path);
  const auto b = plr::image::load_pgm(b_path);
  try {
    std::cout << std::setprecision(12) << plr::metrics::psnr(a, b) << "\n";
  } catch (const plr::InfinitePsnr&) {
    std::cout << "inf\n";
  }
  return kOk;
}

std::vector<double> parse_sigma_list(const std::string& text) {
  std::vector<double> sigmas;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || !(value >= 0.0))
      throw CLI::ValidationError("--sigmas", "expected comma-separated nonnegative numbers");
    sigmas.push_back(value);
  }
  if (sigmas.empty()) throw CLI::ValidationError("--sigmas", "list is empty");
  return sigmas;
}

int run_bench(const std::string& corpus_dir, const std::string& sigma_list, std::uint64_t seed,
              const std::string& report_path) {
  const auto sigmas = parse_sigma_list(sigma_list);
  if (!fs::is_directory(corpus_dir)) throw plr::IoError("bench: not a directory: " + corpus_dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "bench: no .pgm files in " << corpus_dir << "\n";
    return kEmpty;
  }

  std::ofstream report(report_path);
  if (!report) throw plr::IoError("bench: cannot write " + report_path);
  report << "# patch-grouped low-rank denoiser bench\n"
         << "# seed: " << seed << "\n"
         << "# noisy images are quantized to 8-bit PGM before denoising\n"
         << "# defaults: d=7 n=35 m=245 t=1.5*sigma stride=7 path=pca\n"
         << "image,sigma,d,n,m,t_factor,stride,path,psnr_db,seconds\n";

  int rows = 0;
  for (const auto& file : files) {
    plr::image::GrayImage clean;
    try {
      clean = plr::image::load_pgm(file);
    } catch (const plr::Error& e) {
      std::cerr << "bench: skipping " << file.string() << ": " << e.what() << "\n";
      continue;
    }
    for (const double sigma : sigmas) {
      const auto params = plr::denoise::DenoiseParams::defaults(sigma);
      // Quantize the noisy image exactly as the on-disk artifact so the file
      // next to the report is what was actually denoised.
      const auto noisy_bytes =
          plr::image::write_pgm(plr::metrics::add_gaussian_noise(clean, {sigma, seed}));
      const fs::path noisy_path =
          fs::path(report_path).parent_path() /
          (file.stem().string() + "_noisy_s" + format_number(sigma) + ".pgm");
      {
        std::ofstream noisy_file(noisy_path, std::ios::binary);
        if (!noisy_file) throw plr::IoError("bench: cannot write " + noisy_path.string());
        noisy_file << noisy_bytes;
      }
      const auto noisy = plr::image::read_pgm(noisy_bytes);

      const auto start = Clock::now();
      const auto restored = plr::denoise::denoise_image(noisy, params, /*threads=*/0);
      const double elapsed = seconds_since(start);
      const double psnr_db = plr::metrics::psnr(clean, restored);

      report << file.stem().string() << "," << format_number(sigma) << "," << params.patch_size
             << "," << params.window << "," << params.group_size << ","
             << format_number(params.t_factor) << "," << params.stride << ","
             << (params.path == plr::denoise::Path::kPca ? "pca" : "svd") << ","
             << format_number(psnr_db) << "," << format_number(elapsed) << "\n";
      std::cout << file.stem().string() << " sigma=" << format_number(sigma)
                << " psnr=" << format_number(psnr_db) << " dB (" << format_number(elapsed)
                << " s)\n";
      ++rows;
    }
  }
  std::cout << rows << " row" << (rows == 1 ? "" : "s") << " -> " << report_path << "\n";
  return rows > 0 ? kOk : kEmpty;
}

int run_verify(int trials, std::uint64_t seed) {
  if (trials <= 0) {
    std::cerr << "verify: no trials requested; nothing was checked\n";
    return kOk;
  }
  bool all_ok = true;
  for (const auto& suite : plr::verify::run_all(trials, seed)) {
    const int total = suite.passed + suite.failed;
    std::cout << suite.name << ": " << suite.passed << "/" << total << " oracle agreements";
    if (suite.skipped > 0) std::cout << " (" << suite.skipped << " near-tie draws excluded)";
    std::cout << "\n";
    all_ok = all_ok && suite.ok();
  }
  if (!all_ok) {
    std::cerr << "verify: FAILED\n";
    return kCompute;
  }
  std::cout << "verify: all suites passed\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-grouped low-rank image denoiser"};
  app.require_subcommand(1);

  DenoiseFlags dn;
  auto* denoise_cmd = app.add_subcommand("denoise", "Denoise a PGM image");
  denoise_cmd->add_option("input", dn.input, "Input PGM")->required();
  denoise_cmd->add_option("output", dn.output, "Output PGM")->required();
  denoise_cmd->add_option("--sigma", dn.sigma, "Noise standard deviation")->required();
  denoise_cmd->add_option("--patch-size", dn.patch_size, "Patch side d")->capture_default_str();
  denoise_cmd->add_option("--window", dn.window, "Search window side n")->capture_default_str();
  denoise_cmd->add_option("--group-size", dn.group_size, "Patches per group m (default 5*d^2)");
  denoise_cmd->add_option("--t-factor", dn.t_factor, "Threshold factor (t = factor * sigma)")
      ->capture_default_str();
  denoise_cmd->add_option("--stride", dn.stride, "Reference-grid step (default: patch size)");
  denoise_cmd->add_option("--path", dn.path, "Shrinkage route")
      ->check(CLI::IsMember({"pca", "svd"}))
      ->capture_default_str();
  denoise_cmd->add_option("--threads", dn.threads, "Worker threads (0 = auto)")
      ->capture_default_str();

  std::string noise_in, noise_out;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 1;
  auto* noise_cmd = app.add_subcommand("noise", "Add seeded Gaussian noise to a PGM image");
  noise_cmd->add_option("input", noise_in, "Input PGM")->required();
  noise_cmd->add_option("output", noise_out, "Output PGM")->required();
  noise_cmd->add_option("--sigma", noise_sigma, "Noise standard deviation")->required();
  noise_cmd->add_option("--seed", noise_seed, "Noise seed")->capture_default_str();

  std::string psnr_a, psnr_b;
  auto* psnr_cmd = app.add_subcommand("psnr", "Print the PSNR between two PGM images");
  psnr_cmd->add_option("a", psnr_a, "Reference PGM")->required();
  psnr_cmd->add_option("b", psnr_b, "Estimate PGM")->required();

  std::string bench_dir, bench_sigmas = "10,20", bench_out = "report.csv";
  std::uint64_t bench_seed = 1;
  auto* bench_cmd = app.add_subcommand("bench", "Noise + denoise every PGM in a directory");
  bench_cmd->add_option("corpus-dir", bench_dir, "Directory of PGM images")->required();
  bench_cmd->add_option("--sigmas", bench_sigmas, "Comma-separated noise levels")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_seed, "Noise seed")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Report CSV path")->capture_default_str();

  int verify_trials = 200;
  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "Run the randomized self-check suites");
  verify_cmd->add_option("--trials", verify_trials, "Trial budget")->capture_default_str();
  verify_cmd->add_option("--seed", verify_seed, "Suite seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*denoise_cmd) return run_denoise(dn);
    if (*noise_cmd) return run_noise(noise_in, noise_out, noise_sigma, noise_seed);
    if (*psnr_cmd) return run_psnr(psnr_a, psnr_b);
    if (*bench_cmd) return run_bench(bench_dir, bench_sigmas, bench_seed, bench_out);
    if (*verify_cmd) return run_verify(verify_trials, verify_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const plr::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const plr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const plr::UnsupportedMaxval& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const plr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCompute;
  }
  return kUsage;
}

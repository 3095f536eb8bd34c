// Acceptance run: one PASS/FAIL line per criterion. Criteria 1-5 call the
// library directly; 6-8 drive the command-line tool on a synthetic corpus.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "accent/discriminant.hpp"
#include "accent/mfcc.hpp"
#include "accent/svm.hpp"
#include "accent/text.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace accent;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Row {
  std::string classifier;
  long q = 0;
  std::string mean_acc;
  std::string std_acc;
  double train_s = 0.0;
  double predict_s = 0.0;
};

int run(const std::string& command) {
  std::cout << "  $ " << command << std::endl;
  return std::system(command.c_str());
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<Row> read_report(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("missing report " + csv.string());
  std::vector<Row> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw std::runtime_error("malformed report line: " + line);
    rows.push_back({f[0], std::stol(f[1]), f[2], f[3], parse_double(f[4], "train_s"), parse_double(f[5], "predict_s")});
  }
  return rows;
}

std::string accuracy_columns(const std::vector<Row>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.classifier + ',' + std::to_string(r.q) + ',' + r.mean_acc + ',' + r.std_acc + '\n';
  return out;
}

// 1: the full unit suite, which holds every worked example and oracle check.
Outcome equation_suite(const std::string& unit_binary, const fs::path& work) {
  const fs::path log = work / "unit_suite.log";
  const int status = run(quote(unit_binary) + " --minimal > " + quote(log) + " 2>&1");
  if (status != 0) return {false, "unit suite failed, see " + log.string()};
  return {true, "all unit cases passed"};
}

// 2: mel roundtrip and strict monotonicity on a 10,000-point grid.
Outcome mel_roundtrip() {
  const int n = 10000;
  double worst = 0.0;
  double previous = -1.0;
  bool increasing = true;
  for (int i = 0; i < n; ++i) {
    const double f = 22050.0 * i / (n - 1);
    const double mel = hz_to_mel(f);
    if (i > 0 && !(mel > previous)) increasing = false;
    previous = mel;
    const double back = mel_to_hz(mel);
    const double rel = f == 0.0 ? std::abs(back) : std::abs(back - f) / f;
    worst = std::max(worst, rel);
  }
  const bool pass = worst <= 1e-6 && increasing;
  return {pass, "max relative roundtrip error " + format_double(worst) + (increasing ? ", strictly increasing" : ", NOT increasing")};
}

// 3: Parseval per frame, DCT-III roundtrip, pure-tone filter localisation.
Outcome dsp_invariants() {
  std::mt19937_64 gen(3);
  MfccConfig cfg;
  const int rate = 16000;

  AudioClip noise;
  noise.sample_rate = rate;
  noise.samples = test::random_matrix(gen, rate, 1, 0.3);
  const FrameMatrix frames = frame_and_window(noise, cfg);
  const PowerSpectra spectra = power_spectrum(frames);
  const Eigen::Index n = spectra.fft_size;
  double parseval = 0.0;
  for (Eigen::Index r = 0; r < frames.frames.rows(); ++r) {
    const auto p = spectra.spectra.row(r);
    const double spectral = (p[0] + p[n / 2] + 2.0 * p.segment(1, n / 2 - 1).sum()) / static_cast<double>(n);
    const double temporal = frames.frames.row(r).squaredNorm();
    parseval = std::max(parseval, std::abs(spectral - temporal) / temporal);
  }

  double dct = 0.0;
  for (Eigen::Index m : {13, 26, 40}) {
    const Eigen::VectorXd s = test::random_matrix(gen, m, 1, 5.0);
    dct = std::max(dct, (test::dct3_inverse(dct_cepstrum(s, m)) - s).cwiseAbs().maxCoeff());
  }

  const MelFilterbank bank = build_filterbank(cfg, 512, rate);
  std::uniform_real_distribution<double> pick(200.0, 4000.0);
  int localised = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double f0 = pick(gen);
    AudioClip tone;
    tone.sample_rate = rate;
    tone.samples.resize(400);
    for (Eigen::Index i = 0; i < 400; ++i) tone.samples[i] = 0.5 * std::sin(2.0 * std::numbers::pi * f0 * i / rate);
    const PowerSpectra p = power_spectrum(frame_and_window(tone, cfg));
    Eigen::Index best, nearest;
    filterbank_log_energies(p.spectra.row(0).transpose(), bank).maxCoeff(&best);
    (bank.center_freqs.array() - f0).abs().minCoeff(&nearest);
    localised += std::abs(best - nearest) <= 1;
  }

  const bool pass = parseval <= 1e-6 && dct <= 1e-9 && localised == 20;
  return {pass, "Parseval rel " + format_double(parseval) + ", DCT roundtrip " + format_double(dct) + ", tones " +
                    std::to_string(localised) + "/20 within one filter"};
}

// 4: LDA and QDA against a direct Gaussian-density argmax.
Outcome bayes_oracle() {
  std::mt19937_64 gen(4);
  const Eigen::MatrixXd means = test::random_matrix(gen, 2, 5, 1.5);
  Eigen::MatrixXd l0 = test::random_matrix(gen, 5, 5, 0.5);
  l0.diagonal().array() += 1.0;
  Eigen::MatrixXd l1 = test::random_matrix(gen, 5, 5, 0.5);
  l1.diagonal().array() += 0.7;
  const Dataset d = test::gaussian_dataset(gen, means, {l0, l1}, {150, 120});
  const LdaModel lda = lda_train(d);
  const QdaModel qda = qda_train(d);
  const auto counts = d.class_counts();
  const std::vector<double> priors = {static_cast<double>(counts[0]) / d.size(), static_cast<double>(counts[1]) / d.size()};
  const std::vector<Eigen::VectorXd> mu = {test::class_mean(d, 0), test::class_mean(d, 1)};
  Eigen::MatrixXd pooled = (test::class_scatter(d, 0, mu[0]) + test::class_scatter(d, 1, mu[1])) / (d.size() - 2.0);
  pooled.diagonal().array() += lda.ridge;
  std::vector<Eigen::MatrixXd> per_class;
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXd c = test::class_scatter(d, k, mu[static_cast<std::size_t>(k)]) / (counts[k] - 1.0);
    c.diagonal().array() += qda.ridges[static_cast<std::size_t>(k)];
    per_class.push_back(c);
  }
  int lda_agree = 0, qda_agree = 0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::VectorXd x = test::random_matrix(gen, 5, 1, 3.0);
    lda_agree += discriminant_predict(lda_score(lda, x)) == test::bayes_argmax(priors, mu, {pooled, pooled}, x);
    qda_agree += discriminant_predict(qda_score(qda, x)) == test::bayes_argmax(priors, mu, per_class, x);
  }
  return {lda_agree == 1000 && qda_agree == 1000,
          "LDA " + std::to_string(lda_agree) + "/1000, QDA " + std::to_string(qda_agree) + "/1000 agree"};
}

// 5: KKT residuals on 20 random problems per kernel, plus the two-point case.
Outcome svm_correctness() {
  int satisfied = 0;
  double worst = -1.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(500 + seed);
    const Eigen::MatrixXd means = test::random_matrix(gen, 2, 5, 1.0);
    const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(5, 5);
    const Dataset d = test::gaussian_dataset(gen, means, {chol, chol}, {50, 50});
    for (const KernelSpec& kernel : {KernelSpec::rbf(0.2), KernelSpec::polynomial(2, 1.0)}) {
      SvmOptions options;
      const SvmSolution s = svm_solve(d, kernel, options);
      const double excess = test::kkt_excess(d, kernel, s, options.C, options.tol);
      worst = std::max(worst, excess);
      satisfied += excess <= 1e-12;
    }
  }
  Dataset two;
  two.points.resize(2, 1);
  two.points << -1, 1;
  two.labels = {0, 1};
  two.ids = {"x1", "x2"};
  SvmOptions options;
  options.C = 10.0;
  options.tol = 1e-10;
  const SvmSolution s = svm_solve(two, KernelSpec::rbf(1.0), options);
  const double alpha_err = std::max(std::abs(s.alphas[0] - test::kTwoPointAlpha), std::abs(s.alphas[1] - test::kTwoPointAlpha)) /
                           test::kTwoPointAlpha;
  const bool pass = satisfied == 40 && alpha_err <= 1e-6;
  return {pass, std::to_string(satisfied) + "/40 problems within tol (worst excess " + format_double(worst) +
                    "), two-point alpha rel error " + format_double(alpha_err)};
}

struct BenchmarkRun {
  std::vector<Row> rows;
  std::string features;
  double seconds = 0.0;
};

BenchmarkRun benchmark(const std::string& cli, const fs::path& manifest, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const fs::path prefix = out_dir / "report";
  const auto start = std::chrono::steady_clock::now();
  const int status = run(quote(cli) + " benchmark --manifest " + quote(manifest) + " --report " + quote(prefix) +
                         " --seed 20240 --reps 50 --threads 1"
                         " --classifiers lda,qda,svm-rbf:gamma=scale,svm-poly:C=1e-5,knn > " +
                         quote(out_dir / "stdout.txt") + " 2>&1");
  BenchmarkRun result;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (status != 0) throw std::runtime_error("benchmark exited with status " + std::to_string(status));
  result.rows = read_report(prefix.string() + ".csv");
  result.features = slurp(prefix.string() + "_features.csv");
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string cli, unit;
  fs::path work;
  app.add_option("--cli", cli, "command-line tool")->required();
  app.add_option("--unit", unit, "unit-test binary")->required();
  app.add_option("--work", work, "scratch directory")->required();
  CLI11_PARSE(app, argc, argv);
  fs::remove_all(work);
  fs::create_directories(work);

  int failures = 0;
  auto report = [&](int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0.0 && s >= limit_s) {
      o.pass = false;
      o.detail += "; over the " + format_double(limit_s) + " s limit";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << " (" << format_double(std::round(s * 1000) / 1000)
              << " s): " << o.detail << std::endl;
  };

  report(1, "equation unit suite", 10.0, [&] { return equation_suite(unit, work); });
  report(2, "mel roundtrip and monotonicity", 1.0, mel_roundtrip);
  report(3, "DSP invariants", 30.0, dsp_invariants);
  report(4, "LDA/QDA Bayes-oracle equivalence", 10.0, bayes_oracle);
  report(5, "SVM KKT and two-point closed form", 60.0, svm_correctness);

  BenchmarkRun first, second;
  std::string bench_error;
  double bench_seconds = 0.0;
  try {
    const fs::path corpus = work / "corpus";
    if (run(quote(cli) + " synth --out " + quote(corpus) + " --seed 330 > /dev/null") != 0) {
      throw std::runtime_error("synth failed");
    }
    const auto start = std::chrono::steady_clock::now();
    first = benchmark(cli, corpus / "manifest.csv", work / "run1");
    bench_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    second = benchmark(cli, corpus / "manifest.csv", work / "run2");
  } catch (const std::exception& e) {
    bench_error = e.what();
  }

  report(6, "desk-scale accuracy grid", 0.0, [&]() -> Outcome {
    if (!bench_error.empty()) return {false, bench_error};
    if (first.rows.size() != 25) return {false, std::to_string(first.rows.size()) + " report rows, expected 25"};
    std::map<std::string, std::map<long, double>> acc;
    for (const auto& r : first.rows) acc[r.classifier][r.q] = std::stod(r.mean_acc);
    bool pass = bench_seconds < 600.0;
    std::string detail;
    for (const auto& name : {"lda", "qda", "svm-rbf", "svm-poly", "knn"}) {
      const auto& by_q = acc[name];
      const double q12 = by_q.at(12), q33 = by_q.at(33);
      double lowest = 1.0;
      for (const auto& [q, a] : by_q) lowest = std::min(lowest, a);
      const bool trend = q33 >= q12 - 0.03;
      const bool level = std::string(name) == "lda" || lowest >= 0.85;
      pass = pass && trend && level;
      detail += std::string(name) + " q12=" + format_double(std::round(q12 * 1000) / 1000) + " q33=" +
                format_double(std::round(q33 * 1000) / 1000) + " min=" + format_double(std::round(lowest * 1000) / 1000) +
                (trend && level ? "" : " (miss)") + "; ";
    }
    return {pass, detail + "grid " + format_double(std::round(bench_seconds * 10) / 10) + " s"};
  });

  report(7, "k-NN uses the least total time", 0.0, [&]() -> Outcome {
    if (!bench_error.empty()) return {false, bench_error};
    std::map<std::string, double> total;
    for (const auto& r : first.rows) total[r.classifier] += r.train_s + r.predict_s;
    bool pass = true;
    std::string detail;
    for (const auto& [name, t] : total) {
      detail += name + "=" + format_double(std::round(t * 1e4) / 1e4) + " s ";
      if (name != "knn" && !(total["knn"] < t)) pass = false;
    }
    return {pass, detail};
  });

  report(8, "reproducibility across runs", 0.0, [&]() -> Outcome {
    if (!bench_error.empty()) return {false, bench_error};
    const bool acc_same = accuracy_columns(first.rows) == accuracy_columns(second.rows);
    const bool feat_same = first.features == second.features && !first.features.empty();
    return {acc_same && feat_same, std::string("accuracy columns ") + (acc_same ? "identical" : "DIFFER") +
                                       ", feature CSVs " + (feat_same ? "identical" : "DIFFER")};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

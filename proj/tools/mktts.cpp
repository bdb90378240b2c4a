// Copyright 2026 The mktts Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mktts/corpus/select.hpp"
#include "mktts/dsp/anchor.hpp"
#include "mktts/dsp/griffin_lim.hpp"
#include "mktts/dsp/mel.hpp"
#include "mktts/dsp/mr_stft.hpp"
#include "mktts/dsp/resample.hpp"
#include "mktts/dsp/spectrogram_io.hpp"
#include "mktts/dsp/wav.hpp"
#include "mktts/phonology/front_end.hpp"
#include "mktts/phonology/rules.hpp"
#include "mktts/service/http.hpp"
#include "mktts/service/service.hpp"
#include "mktts/stats/mos.hpp"
#include "mktts/stats/mushra.hpp"

#include <CLI11.hpp>

namespace fs = std::filesystem;
using namespace mktts;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIoError = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw IoError("cannot read " + p.string());
}

std::string read_text(const fs::path& p) {
  require_file(p);
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("cannot read " + p.string());
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + p.string());
}

dsp::WavAudio load_wav(const fs::path& p) {
  require_file(p);
  return dsp::read_wav(p);
}

void save_wav(const fs::path& p, const dsp::WavAudio& a) {
  try {
    dsp::write_wav(p, a);
  } catch (const dsp::WavError& e) {
    throw IoError(e.what());
  }
}

struct LanguageOptions {
  std::string data_dir = MKTTS_DATA_DIR;
  std::string lexicon;
};

struct Language {
  phonology::RuleTables tables;
  phonology::StressLexicon lexicon;
};

Language load_language(const LanguageOptions& o) {
  Language lang{phonology::RuleTables::builtin(), {}};
  if (fs::is_directory(o.data_dir)) lang.tables = phonology::RuleTables::load(o.data_dir);
  fs::path lex = o.lexicon;
  if (lex.empty()) {
    const fs::path fallback = fs::path(o.data_dir) / "stress_lexicon.tsv";
    if (fs::is_regular_file(fallback)) lex = fallback;
  } else {
    require_file(lex);
  }
  if (!lex.empty()) lang.lexicon = phonology::StressLexicon::load(lex, lang.tables);
  return lang;
}

void add_language_flags(CLI::App* cmd, LanguageOptions& o) {
  cmd->add_option("--data-dir", o.data_dir, "Directory with the rule tables");
  cmd->add_option("--lexicon", o.lexicon, "Stress lexicon TSV");
}

std::string syllable_string(const phonology::PhoneSequence& seq) {
  std::string out;
  const auto syl = phonology::syllabify(seq);
  for (std::size_t s = 0; s < syl.size(); ++s) {
    if (s) out += " . ";
    phonology::PhoneSequence part;
    part.phones.assign(seq.phones.begin() + syl[s].begin, seq.phones.begin() + syl[s].end);
    out += phonology::render(part);
  }
  return out;
}

int run_g2p(const std::string& text, const std::string& file, const std::string& format,
            const LanguageOptions& lo) {
  const Language lang = load_language(lo);
  const std::string input = file.empty() ? text : read_text(file);
  std::istringstream lines(input);
  for (std::string line; std::getline(lines, line);) {
    const auto result = phonology::front_end(line, lang.lexicon, lang.tables);
    for (const auto& issue : result.issues) {
      std::cerr << "warning: " << issue.message << "\n";
    }
    if (format == "phones") {
      std::string out;
      for (const auto& phrase : result.phrases) {
        for (const auto& word : phrase.words) {
          if (!out.empty()) out += " | ";
          out += phonology::render(word);
        }
      }
      std::cout << out << "\n";
    } else {
      for (const auto& phrase : result.phrases) {
        for (const auto& word : phrase.words) {
          std::string syllables;
          try {
            syllables = syllable_string(word);
          } catch (const phonology::NoNucleus&) {
            syllables = "-";
          }
          std::cout << word.word << "\t" << phonology::render(word) << "\t" << syllables << "\t"
                    << (word.phrase_final ? "final" : "-") << "\n";
        }
        std::cout << (phrase.sentence_final ? "||" : "|") << "\n";
      }
    }
  }
  return kOk;
}

int run_select(const std::string& input, std::size_t count, std::size_t min_words,
               std::size_t max_words, const std::string& report, const LanguageOptions& lo) {
  const Language lang = load_language(lo);
  std::vector<corpus::UtteranceCandidate> pool;
  for (auto& [id, text] : corpus::parse_candidate_lines(read_text(input))) {
    pool.push_back(corpus::UtteranceCandidate::from_text(id, text, lang.lexicon, lang.tables));
  }
  const auto sel = corpus::greedy_select(pool, {count, min_words, max_words});
  for (const auto* pick : sel.picks) std::cout << pick->id << "\t" << pick->text << "\n";
  const std::string rep =
      corpus::format_report(corpus::coverage_report(sel.state, corpus::diphone_universe(pool)));
  if (report.empty()) {
    std::cerr << rep;
  } else {
    write_text(report, rep);
  }
  return kOk;
}

int run_analyze(const std::string& in, const std::string& out, const std::string& kind,
                double rate) {
  auto audio = load_wav(in);
  if (audio.sample_rate != rate) {
    audio.samples = dsp::resample(audio.samples, audio.sample_rate, rate);
    audio.sample_rate = rate;
  }
  dsp::StftParams p;
  p.sample_rate = rate;
  dsp::StoredSpectrogram s = kind == "magnitude"
                                 ? dsp::StoredSpectrogram::from(dsp::magnitude_spectrogram(audio.samples, p))
                                 : dsp::StoredSpectrogram::from(
                                       dsp::mel_spectrogram(audio.samples, p, dsp::MelParams{}));
  try {
    dsp::write_spectrogram(out, s);
  } catch (const dsp::SpectrogramFormatError& e) {
    throw IoError(e.what());
  }
  return kOk;
}

int run_invert(const std::string& in, int iters, std::uint64_t seed, const std::string& out) {
  require_file(in);
  const auto stored = dsp::read_spectrogram(in);
  const auto mag = stored.kind == dsp::SpectrogramKind::LogMel ? dsp::mel_to_linear(stored.as_mel())
                                                               : stored.as_magnitude();
  const auto result = dsp::griffin_lim(mag, iters, seed);
  save_wav(out, {mag.params.sample_rate, result.signal});
  if (!result.convergence.empty()) {
    std::printf("spectral_convergence: %.6f\n", result.convergence.back());
  }
  return kOk;
}

int run_anchor(double cutoff, const std::string& in, const std::string& out) {
  const auto audio = load_wav(in);
  save_wav(out, {audio.sample_rate, dsp::lowpass_anchor(audio.samples, cutoff, audio.sample_rate)});
  return kOk;
}

int run_distance(const std::string& a, const std::string& b) {
  const auto x = load_wav(a);
  const auto y = load_wav(b);
  if (x.sample_rate != y.sample_rate) throw dsp::DspError("sample rates differ");
  const auto d = dsp::mr_stft_distance(x.samples, y.samples, dsp::default_resolutions(x.sample_rate));
  std::printf("total: %.6f\n", d.total);
  for (const auto& t : d.terms) {
    std::printf("fft%zu_win%zu_hop%zu: sc=%.6f logmag=%.6f\n", t.params.fft_size, t.params.win_size,
                t.params.hop, t.spectral_convergence, t.log_magnitude);
  }
  return kOk;
}

std::vector<stats::RatingRecord> load_ratings(const std::string& path) {
  require_file(path);
  return stats::load_records(path);
}

int run_stats_mos(const std::string& in, const std::string& natural) {
  std::vector<stats::RatingRecord> mos;
  for (auto& r : load_ratings(in)) {
    if (r.scale == stats::Scale::Mos) mos.push_back(std::move(r));
  }
  stats::MosTableOptions o{natural};
  std::cout << stats::render_mos_table(stats::mos_table(mos, o), o);
  return kOk;
}

int run_stats_mushra(const std::string& in, bool no_screen, const std::string& boxplot) {
  std::vector<stats::RatingRecord> mushra;
  for (auto& r : load_ratings(in)) {
    if (r.scale == stats::Scale::Mushra) mushra.push_back(std::move(r));
  }
  if (!no_screen) {
    const auto screen = stats::mushra_post_screen(mushra);
    for (const auto& l : screen.listeners) {
      if (l.excluded) {
        std::cerr << "excluded " << l.listener_id << ": hidden reference below threshold on "
                  << l.failed << " of " << l.trials << " pages\n";
      }
    }
    mushra = screen.filter(mushra);
  }
  const auto report = stats::mushra_aggregate(mushra);
  std::cout << stats::render_mushra_table(report);
  if (!boxplot.empty()) write_text(boxplot, stats::boxplot_csv(report));
  return kOk;
}

int run_serve(const std::string& dir, int port, const std::string& host) {
  service::Service svc(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    const auto r = svc.create_test(service::load_definition(entry.path()));
    std::cerr << (r.created ? "created " : "loaded ") << r.test_id << " from "
              << entry.path().filename().string() << "\n";
  }
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!service::serve(svc, host, port)) throw IoError("cannot listen on port " + std::to_string(port));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Macedonian TTS evaluation toolkit"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 1 invalid input or usage, 2 I/O failure.");

  LanguageOptions lang;
  std::string text, file, format = "phones";
  auto* g2p = app.add_subcommand("g2p", "Convert text to phones");
  auto* text_opt = g2p->add_option("--text", text, "Input text");
  g2p->add_option("--file", file, "Input file, one utterance per line")->excludes(text_opt);
  g2p->add_option("--format", format, "phones or annotated")
      ->check(CLI::IsMember({"phones", "annotated"}));
  add_language_flags(g2p, lang);

  std::string input, report;
  std::size_t count = 0, min_words = 3, max_words = 20;
  auto* sel = app.add_subcommand("select-corpus", "Greedy diphone-coverage selection");
  sel->add_option("--input", input, "Candidate sentences (text or id<TAB>text)")->required();
  sel->add_option("--count", count, "Number of utterances to pick")->required();
  sel->add_option("--min-words", min_words, "Shortest allowed utterance");
  sel->add_option("--max-words", max_words, "Longest allowed utterance");
  sel->add_option("--report", report, "Write the coverage report here instead of stderr");
  add_language_flags(sel, lang);

  std::string in, out, kind = "mel";
  double rate = dsp::kAnalysisRate;
  auto* analyze = app.add_subcommand("analyze", "Compute a spectrogram from a WAV file");
  analyze->add_option("--in", in, "Input WAV")->required();
  analyze->add_option("--out", out, "Output spectrogram (.csv or binary)")->required();
  analyze->add_option("--kind", kind, "mel or magnitude")->check(CLI::IsMember({"mel", "magnitude"}));
  analyze->add_option("--rate", rate, "Analysis sample rate");

  std::string mel;
  int iters = 60;
  std::uint64_t seed = 0;
  auto* invert = app.add_subcommand("invert", "Griffin-Lim inversion of a spectrogram");
  invert->add_option("--mel", mel, "Spectrogram file (log-mel or magnitude)")->required();
  invert->add_option("--iters", iters, "Iterations")->check(CLI::NonNegativeNumber);
  invert->add_option("--seed", seed, "Initial phase seed")->required();
  invert->add_option("--out", out, "Output WAV")->required();

  double cutoff = 3500.0;
  auto* anchor = app.add_subcommand("anchor", "Low-pass anchor for MUSHRA");
  anchor->add_option("--cutoff", cutoff, "Cutoff in Hz")->check(CLI::PositiveNumber);
  anchor->add_option("--in", in, "Input WAV")->required();
  anchor->add_option("--out", out, "Output WAV")->required();

  std::string path_a, path_b;
  auto* dist = app.add_subcommand("stft-distance", "Multi-resolution STFT distance");
  dist->add_option("--a", path_a, "Reference WAV")->required();
  dist->add_option("--b", path_b, "Estimate WAV")->required();

  auto* st = app.add_subcommand("stats", "Listening-test statistics");
  st->require_subcommand(1);
  std::string natural = "natural", boxplot;
  bool no_screen = false;
  auto* st_mos = st->add_subcommand("mos", "MOS table");
  st_mos->add_option("--in", in, "Ratings (.jsonl or .csv)")->required();
  st_mos->add_option("--natural", natural, "Condition shown as natural speech");
  auto* st_mushra = st->add_subcommand("mushra", "MUSHRA summary");
  st_mushra->add_option("--in", in, "Ratings (.jsonl or .csv)")->required();
  st_mushra->add_flag("--no-screen", no_screen, "Skip listener post-screening");
  st_mushra->add_option("--boxplot", boxplot, "Write box-plot CSV here");

  std::string test_dir, host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the listening-test service");
  serve->add_option("--test-dir", test_dir, "State directory")->required();
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kInvalid;
  }

  try {
    if (*g2p) {
      if (text.empty() && file.empty()) throw CLI::ValidationError("g2p needs --text or --file");
      return run_g2p(text, file, format, lang);
    }
    if (*sel) return run_select(input, count, min_words, max_words, report, lang);
    if (*analyze) return run_analyze(in, out, kind, rate);
    if (*invert) return run_invert(mel, iters, seed, out);
    if (*anchor) return run_anchor(cutoff, in, out);
    if (*dist) return run_distance(path_a, path_b);
    if (*st_mos) return run_stats_mos(in, natural);
    if (*st_mushra) return run_stats_mushra(in, no_screen, boxplot);
    if (*serve) return run_serve(test_dir, port, host);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const service::DefinitionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

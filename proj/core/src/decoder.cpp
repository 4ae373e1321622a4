#include "kgatt/decoder.hpp"

#include <cmath>
#include <string>

namespace kgatt {
namespace {

void check_sizes(std::span<const double> s, std::span<const double> r, std::span<const double> o) {
  if (s.size() != r.size() || s.size() != o.size()) {
    throw Error("decoder dimension mismatch: " + std::to_string(s.size()) + ", " + std::to_string(r.size()) +
                ", " + std::to_string(o.size()));
  }
}

void check_even(std::size_t d) {
  if (d % 2 != 0) throw Error("ComplEx decoder requires an even dimension, got " + std::to_string(d));
}

}  // namespace

std::string_view to_string(DecoderKind kind) {
  return kind == DecoderKind::distmult ? "distmult" : "complex";
}

DecoderKind parse_decoder(std::string_view name) {
  if (name == "distmult") return DecoderKind::distmult;
  if (name == "complex") return DecoderKind::complex;
  throw Error("unknown decoder '" + std::string(name) + "' (expected distmult or complex)");
}

double score_distmult(std::span<const double> subject, std::span<const double> relation,
                      std::span<const double> object) {
  check_sizes(subject, relation, object);
  double acc = 0.0;
  for (std::size_t k = 0; k < subject.size(); ++k) acc += subject[k] * relation[k] * object[k];
  return acc;
}

double score_complex(std::span<const double> subject, std::span<const double> relation,
                     std::span<const double> object) {
  check_sizes(subject, relation, object);
  check_even(subject.size());
  const std::size_t h = subject.size() / 2;
  double acc = 0.0;
  for (std::size_t k = 0; k < h; ++k) {
    const double sr = subject[k], si = subject[h + k];
    const double rr = relation[k], ri = relation[h + k];
    const double orr = object[k], oi = object[h + k];
    acc += sr * rr * orr + si * rr * oi + sr * ri * oi - si * ri * orr;
  }
  return acc;
}

double score(DecoderKind kind, std::span<const double> subject, std::span<const double> relation,
             std::span<const double> object) {
  return kind == DecoderKind::distmult ? score_distmult(subject, relation, object)
                                       : score_complex(subject, relation, object);
}

void accumulate_score_gradient(DecoderKind kind, std::span<const double> subject, std::span<const double> relation,
                               std::span<const double> object, double upstream, std::span<double> d_subject,
                               std::span<double> d_relation, std::span<double> d_object) {
  check_sizes(subject, relation, object);
  if (kind == DecoderKind::distmult) {
    for (std::size_t k = 0; k < subject.size(); ++k) {
      d_subject[k] += upstream * relation[k] * object[k];
      d_relation[k] += upstream * subject[k] * object[k];
      d_object[k] += upstream * subject[k] * relation[k];
    }
    return;
  }
  check_even(subject.size());
  const std::size_t h = subject.size() / 2;
  for (std::size_t k = 0; k < h; ++k) {
    const double sr = subject[k], si = subject[h + k];
    const double rr = relation[k], ri = relation[h + k];
    const double orr = object[k], oi = object[h + k];
    d_subject[k] += upstream * (rr * orr + ri * oi);
    d_subject[h + k] += upstream * (rr * oi - ri * orr);
    d_relation[k] += upstream * (sr * orr + si * oi);
    d_relation[h + k] += upstream * (sr * oi - si * orr);
    d_object[k] += upstream * (sr * rr - si * ri);
    d_object[h + k] += upstream * (si * rr + sr * ri);
  }
}

double probability(double raw_score) {
  if (raw_score >= 0.0) return 1.0 / (1.0 + std::exp(-raw_score));
  const double z = std::exp(raw_score);
  return z / (1.0 + z);
}

}  // namespace kgatt

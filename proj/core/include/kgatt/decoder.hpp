#pragma once

#include <span>
#include <string_view>

#include "kgatt/common.hpp"

namespace kgatt {

enum class DecoderKind { distmult, complex };

std::string_view to_string(DecoderKind kind);
DecoderKind parse_decoder(std::string_view name);

/// sum_k s[k] * r[k] * o[k]
double score_distmult(std::span<const double> subject, std::span<const double> relation,
                      std::span<const double> object);

/// Re(<s, r, conj(o)>) with each vector laid out as [real half | imaginary half].
double score_complex(std::span<const double> subject, std::span<const double> relation,
                     std::span<const double> object);

double score(DecoderKind kind, std::span<const double> subject, std::span<const double> relation,
             std::span<const double> object);

/// Accumulates upstream * d(score)/d(input) into the three gradient buffers.
void accumulate_score_gradient(DecoderKind kind, std::span<const double> subject, std::span<const double> relation,
                               std::span<const double> object, double upstream, std::span<double> d_subject,
                               std::span<double> d_relation, std::span<double> d_object);

/// Logistic sigmoid.
double probability(double raw_score);

}  // namespace kgatt

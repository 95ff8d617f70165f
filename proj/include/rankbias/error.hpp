#pragma once

// Error taxonomy for the rankbias toolkit.
// Two families: UnusableData (inputs are well-formed but empty or too thin
// to compute on) and MalformedInput (inputs or parameters are broken).
// The CLI maps UnusableData to exit code 1 and MalformedInput to exit code 2.

#include <stdexcept>
#include <string>

namespace rankbias {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnusableData : Error {
  using Error::Error;
};

struct MalformedInput : Error {
  using Error::Error;
};

// ── unusable data ────────────────────────────────────────────────────────

struct EmptyInput : UnusableData {
  using UnusableData::UnusableData;
};

struct EmptyCorpus : UnusableData {
  using UnusableData::UnusableData;
};

struct NoUsableSnapshots : UnusableData {
  using UnusableData::UnusableData;
};

struct NoFollowings : UnusableData {
  using UnusableData::UnusableData;
};

struct TooFewFollowings : UnusableData {
  using UnusableData::UnusableData;
};

struct EmptySeedSet : UnusableData {
  using UnusableData::UnusableData;
};

struct AllZeroVectors : UnusableData {
  using UnusableData::UnusableData;
};

struct UninferableBias : UnusableData {
  using UnusableData::UnusableData;
};

struct EmptyJudgments : UnusableData {
  using UnusableData::UnusableData;
};

struct NoOverlap : UnusableData {
  using UnusableData::UnusableData;
};

struct EmptyPopulation : UnusableData {
  using UnusableData::UnusableData;
};

// ── malformed input ──────────────────────────────────────────────────────

struct RankOutOfRange : MalformedInput {
  using MalformedInput::MalformedInput;
};

struct UnknownItem : MalformedInput {
  using MalformedInput::MalformedInput;
};

struct InvalidParams : MalformedInput {
  using MalformedInput::MalformedInput;
};

struct ParseError : MalformedInput {
  using MalformedInput::MalformedInput;
};

struct SchemaViolation : MalformedInput {
  using MalformedInput::MalformedInput;
};

struct InvalidConfig : MalformedInput {
  using MalformedInput::MalformedInput;
};

}  // namespace rankbias

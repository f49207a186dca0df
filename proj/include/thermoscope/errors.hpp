#pragma once

#include <stdexcept>
#include <string>

namespace thermoscope {

// Two error families, matching the CLI exit-code scheme:
// ValidationError -> exit 2 (bad inputs, violated invariants, malformed files)
// NumericalError  -> exit 3 (fits that fail, unresolvable deconvolution, ...)

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// sigma_image <= sigma_psf: the source is unresolved at this PSF
class DeconvolutionError : public NumericalError {
 public:
  explicit DeconvolutionError(const std::string& what) : NumericalError(what) {}
};

class FitConvergenceError : public NumericalError {
 public:
  explicit FitConvergenceError(const std::string& what) : NumericalError(what) {}
};

// Moment seeding produced no usable starting point (flat profile, sigma <= 0)
class DegenerateProfileError : public NumericalError {
 public:
  explicit DegenerateProfileError(const std::string& what) : NumericalError(what) {}
};

// Correlation histogram has no spectral peak above the noise floor
class SeedFailureError : public NumericalError {
 public:
  explicit SeedFailureError(const std::string& what) : NumericalError(what) {}
};

// omega' < |detuning|: the calibration point violated omega' >> |detuning|
class ImaginaryResultError : public NumericalError {
 public:
  explicit ImaginaryResultError(const std::string& what) : NumericalError(what) {}
};

class UnderDeterminedError : public NumericalError {
 public:
  explicit UnderDeterminedError(const std::string& what) : NumericalError(what) {}
};

}  // namespace thermoscope

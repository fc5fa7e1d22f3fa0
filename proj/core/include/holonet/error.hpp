#pragma once

#include <stdexcept>
#include <string>

namespace holonet {

// Malformed or inconsistent input: bad graph data, shape mismatches, config problems.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation could not be carried out: singular solves, divergence, unstable spectra.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HOLONET_DEFINE_ERROR(Name, Base) \
  class Name : public Base {             \
   public:                               \
    using Base::Base;                    \
  }

HOLONET_DEFINE_ERROR(NegativeWeight, InputError);
HOLONET_DEFINE_ERROR(IndexOutOfRange, InputError);
HOLONET_DEFINE_ERROR(NonpositiveNodeWeight, InputError);
HOLONET_DEFINE_ERROR(ShapeMismatch, InputError);
HOLONET_DEFINE_ERROR(ParseError, InputError);
HOLONET_DEFINE_ERROR(OverlappingReaches, InputError);
HOLONET_DEFINE_ERROR(KirchhoffViolation, InputError);
HOLONET_DEFINE_ERROR(NonRealBank, InputError);

HOLONET_DEFINE_ERROR(SingularResolvent, NumericalError);
HOLONET_DEFINE_ERROR(PoleOnSpectrum, NumericalError);
HOLONET_DEFINE_ERROR(IllConditionedSpectrum, NumericalError);
HOLONET_DEFINE_ERROR(NonFiniteLoss, NumericalError);

#undef HOLONET_DEFINE_ERROR

}  // namespace holonet

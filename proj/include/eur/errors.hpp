#pragma once

#include <stdexcept>
#include <string>

namespace eur {

// Base of every error raised by the library. Callers that only care about
// "bad input vs. numerical trouble" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define EUR_DEFINE_ERROR(Name)                                    \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

EUR_DEFINE_ERROR(InvalidSpectrum);
EUR_DEFINE_ERROR(ApproximationFailure);
EUR_DEFINE_ERROR(InvalidS);
EUR_DEFINE_ERROR(InvalidState);
EUR_DEFINE_ERROR(ZeroVector);
EUR_DEFINE_ERROR(OutsideBall);
EUR_DEFINE_ERROR(DimensionMismatch);
EUR_DEFINE_ERROR(InvalidDistribution);
EUR_DEFINE_ERROR(NonPositiveArgument);
EUR_DEFINE_ERROR(OutOfRange);
EUR_DEFINE_ERROR(NoAdmissiblePair);
EUR_DEFINE_ERROR(EtaOutOfRange);
EUR_DEFINE_ERROR(AlphaOutOfApplicableRange);
EUR_DEFINE_ERROR(QuadratureUnconverged);
EUR_DEFINE_ERROR(InvalidPartition);

#undef EUR_DEFINE_ERROR

}  // namespace eur

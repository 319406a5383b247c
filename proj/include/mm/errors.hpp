#ifndef MM_ERRORS_HPP
#define MM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mm {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define MM_DEFINE_ERROR(Name)                                              \
    struct Name : Error {                                                  \
        explicit Name(const std::string& msg = #Name) : Error(msg) {}      \
    }

MM_DEFINE_ERROR(NotMonic);
MM_DEFINE_ERROR(NotSquarefree);
MM_DEFINE_ERROR(ZeroInput);
MM_DEFINE_ERROR(ZeroDivisor);
MM_DEFINE_ERROR(InternalInconsistency);
MM_DEFINE_ERROR(ConstantMap);
MM_DEFINE_ERROR(PoleOnBranchLocus);
MM_DEFINE_ERROR(NonSquarefreePlace);
MM_DEFINE_ERROR(MismatchedDivisor);
MM_DEFINE_ERROR(ConditionViolated);
MM_DEFINE_ERROR(NotAMorphism);
MM_DEFINE_ERROR(NonReducedInput);
MM_DEFINE_ERROR(SupportsOverlap);
MM_DEFINE_ERROR(TruncationUnstable);
MM_DEFINE_ERROR(AuxiliaryPointUnavailable);
MM_DEFINE_ERROR(BadIndex);
MM_DEFINE_ERROR(UnsupportedGeometry);
MM_DEFINE_ERROR(Mismatch);
MM_DEFINE_ERROR(AxiomViolation);
MM_DEFINE_ERROR(ParseError);
MM_DEFINE_ERROR(IOError);

#undef MM_DEFINE_ERROR

} // namespace mm

#endif

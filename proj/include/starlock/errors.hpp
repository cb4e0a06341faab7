#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace starlock {

// Base of every error the library throws. Callers that only care about
// "something in the election pipeline failed" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STARLOCK_DEFINE_ERROR(Name)                \
  class Name : public Error {                      \
   public:                                         \
    explicit Name(const std::string& what_arg)     \
        : Error(std::string(#Name ": ") + what_arg) {} \
  }

// crypto-core
STARLOCK_DEFINE_ERROR(InvalidArgument);
STARLOCK_DEFINE_ERROR(NoDlogInRange);
STARLOCK_DEFINE_ERROR(ParseError);

// trustees
STARLOCK_DEFINE_ERROR(InvalidThreshold);
STARLOCK_DEFINE_ERROR(InsufficientShares);

// ballot
STARLOCK_DEFINE_ERROR(OvervoteRejected);
STARLOCK_DEFINE_ERROR(UnknownOption);

// pollsite
STARLOCK_DEFINE_ERROR(PoolExhausted);
STARLOCK_DEFINE_ERROR(UnknownOrSpentToken);
STARLOCK_DEFINE_ERROR(UnknownSerial);
STARLOCK_DEFINE_ERROR(AlreadyFinalized);
STARLOCK_DEFINE_ERROR(NotProvisional);
STARLOCK_DEFINE_ERROR(TerminalBusy);
STARLOCK_DEFINE_ERROR(InvariantViolation);

// board / verifier
STARLOCK_DEFINE_ERROR(RejectInvalidProof);
STARLOCK_DEFINE_ERROR(NotSpoiled);
STARLOCK_DEFINE_ERROR(AmbiguousReceipt);

// audit
STARLOCK_DEFINE_ERROR(MarginNotPositive);
STARLOCK_DEFINE_ERROR(CommitmentMismatch);
STARLOCK_DEFINE_ERROR(AuditPrecondition);

#undef STARLOCK_DEFINE_ERROR

// Carries the id of the trustee whose decryption share failed verification.
class BadShareProof : public Error {
 public:
  explicit BadShareProof(std::uint32_t trustee_id)
      : Error("BadShareProof: trustee " + std::to_string(trustee_id)),
        trustee_id_(trustee_id) {}

  std::uint32_t trustee_id() const noexcept { return trustee_id_; }

 private:
  std::uint32_t trustee_id_;
};

}  // namespace starlock

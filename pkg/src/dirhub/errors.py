"""Domain error taxonomy.

Every operational failure raises an ApiError subclass. The HTTP layer maps
``http_status``/``code`` onto the wire; the CLI maps them onto exit codes.
"""

from __future__ import annotations


class ApiError(Exception):
    code = "error"
    http_status = 400

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details


class BadRequest(ApiError):
    code = "bad_request"
    http_status = 400


# -- not found ---------------------------------------------------------------

class NotFound(ApiError):
    code = "not_found"
    http_status = 404


class ParentNotFound(NotFound):
    code = "parent_not_found"


class UserNotFound(NotFound):
    code = "user_not_found"


class NoSuchApplication(NotFound):
    code = "no_such_application"


# -- authentication / authorization ------------------------------------------

class AuthFailed(ApiError):
    code = "auth_failed"
    http_status = 401


class PermissionDenied(ApiError):
    code = "permission_denied"
    http_status = 403

    def __init__(self, message: str = "", right: str | None = None, **details):
        if right is not None:
            details["right"] = right
        super().__init__(message or (f"missing right {right}" if right else ""), **details)
        self.right = right


class NotOwner(PermissionDenied):
    code = "not_owner"


class Blacklisted(PermissionDenied):
    code = "blacklisted"


# -- validation ---------------------------------------------------------------

class InvalidName(ApiError):
    code = "invalid_name"


class InvalidTitle(ApiError):
    code = "invalid_title"


class InvalidAttachment(ApiError):
    code = "invalid_attachment"


class WeakPassword(ApiError):
    code = "weak_password"


class EmptyQuery(ApiError):
    code = "empty_query"


class EmptyTerm(ApiError):
    code = "empty_term"


class InvalidMode(ApiError):
    code = "invalid_mode"


class RemotePathRejected(ApiError):
    code = "remote_path_rejected"


# -- state conflicts (409) -----------------------------------------------------

class Conflict(ApiError):
    code = "conflict"
    http_status = 409


class DuplicateName(Conflict):
    code = "duplicate_name"


class NotEmpty(Conflict):
    code = "not_empty"

    def __init__(self, reason: str, **details):
        super().__init__(f"directory not empty: {reason}", reason=reason, **details)
        self.reason = reason


class RootUndeletable(Conflict):
    code = "root_undeletable"


class RootUntrashable(Conflict):
    code = "root_untrashable"


class AlreadyTrashed(Conflict):
    code = "already_trashed"


class NotTrashed(Conflict):
    code = "not_trashed"


class ParentTrashed(Conflict):
    code = "parent_trashed"


class TrashedDirectory(Conflict):
    code = "trashed_directory"


class AlreadyMember(Conflict):
    code = "already_member"


class AlreadyPending(Conflict):
    code = "already_pending"


class NotMember(Conflict):
    code = "not_member"


class OwnerCannotJoin(Conflict):
    code = "owner_cannot_join"


class AlreadyBlacklisted(Conflict):
    code = "already_blacklisted"


class NotBlacklisted(Conflict):
    code = "not_blacklisted"


class AlreadyGranted(Conflict):
    code = "already_granted"


class NotGranted(Conflict):
    code = "not_granted"


class UsernameTaken(Conflict):
    code = "username_taken"


class DuplicateBinding(Conflict):
    code = "duplicate_binding"


# -- relay availability --------------------------------------------------------

class AgentOffline(ApiError):
    code = "agent_offline"
    http_status = 503


class TransferTimeout(ApiError):
    code = "transfer_timeout"
    http_status = 504

    def __init__(self, message: str = "", bytes_received: int = 0, **details):
        super().__init__(message, bytes_received=bytes_received, **details)
        self.bytes_received = bytes_received


class RemoteProtocolError(ApiError):
    code = "remote_protocol_error"
    http_status = 502


# -- persistence ----------------------------------------------------------------

class SnapshotError(ApiError):
    code = "snapshot_error"
    http_status = 500


class CorruptSnapshot(SnapshotError):
    code = "corrupt_snapshot"


class SchemaVersionMismatch(SnapshotError):
    code = "schema_version_mismatch"

/** Typed mirrors of the wire error codes. */

export class CubeRpcError extends Error {
  constructor(
    public readonly code: number,
    message: string,
    public readonly data?: unknown
  ) {
    super(message);
    this.name = new.target.name;
  }
}

export class ParseError extends CubeRpcError {}
export class InvalidRequestError extends CubeRpcError {}
export class MethodNotFoundError extends CubeRpcError {}
export class InvalidParamsError extends CubeRpcError {}
export class InternalError extends CubeRpcError {}
export class TaskNotFoundError extends CubeRpcError {}
export class TaskTerminatedError extends CubeRpcError {}
export class ResourceExhaustedError extends CubeRpcError {}
export class ToolConfigInvalidError extends CubeRpcError {}
export class SeedRequiredError extends CubeRpcError {}
export class NotResetYetError extends CubeRpcError {}
export class UnknownResourceError extends CubeRpcError {}
export class InvalidPageTokenError extends CubeRpcError {}

const ERROR_CLASSES: Record<number, new (code: number, message: string, data?: unknown) => CubeRpcError> = {
  [-32700]: ParseError,
  [-32600]: InvalidRequestError,
  [-32601]: MethodNotFoundError,
  [-32602]: InvalidParamsError,
  [-32603]: InternalError,
  [-32000]: TaskNotFoundError,
  [-32001]: TaskTerminatedError,
  [-32002]: ResourceExhaustedError,
  [-32003]: ToolConfigInvalidError,
  [-32004]: SeedRequiredError,
  [-32005]: NotResetYetError,
  [-32010]: UnknownResourceError,
  [-32011]: InvalidPageTokenError,
};

export function errorFromCode(code: number, message: string, data?: unknown): CubeRpcError {
  const cls = ERROR_CLASSES[code] ?? CubeRpcError;
  return new cls(code, message, data);
}

// Outgoing commands are validated against the shared JSON schema before
// hitting the wire; the schema file is the single source of truth between
// cockpit and server.

import Ajv, { ValidateFunction } from "ajv";
import commandSchema from "../../schemas/command.schema.json";
import { TeleopCommand } from "./types";

const ajv = new Ajv({ allErrors: true });
const validateFn: ValidateFunction = ajv.compile(commandSchema);

export function validateCommand(cmd: TeleopCommand): string[] {
  if (validateFn(cmd)) {
    return [];
  }
  return (validateFn.errors ?? []).map(
    (e) => `${e.instancePath || "$"} ${e.message ?? "invalid"}`,
  );
}

export function assertValidCommand(cmd: TeleopCommand): TeleopCommand {
  const errors = validateCommand(cmd);
  if (errors.length > 0) {
    throw new Error(`command failed schema validation: ${errors.join("; ")}`);
  }
  return cmd;
}

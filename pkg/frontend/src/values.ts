import type { AttributeValue } from "./types.js";

const INTEGER = /^[+-]?\d+$/;
const DECIMAL = /^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;

// Types a form field the way the engine types CSV cells: integers stay
// numbers, other numerics travel as tagged decimals so the text is
// preserved exactly, everything else is text. No value is computed here.
export function parseAttributeInput(text: string): AttributeValue {
  const trimmed = text.trim();
  if (trimmed === "true") return true;
  if (trimmed === "false") return false;
  if (INTEGER.test(trimmed) && Number.isSafeInteger(Number(trimmed))) {
    return Number(trimmed);
  }
  if (trimmed !== "" && DECIMAL.test(trimmed)) {
    return { decimal: trimmed };
  }
  return text;
}

/**
 * Render model for the agreement panel.
 *
 * Turns either a successful agreement report or a thrown error into the
 * plain strings the panel displays: kappa and its neighbors to three
 * decimals, the 2x2 table, the partial-coverage flag, the disagreement
 * list, and the dedicated "insufficient overlap" state for the 409 the
 * server answers when the sessions cannot be compared yet.
 */

import { ApiError, type AgreementReport, type Disagreement } from "./api.js";

export interface AgreementStats {
  state: "report";
  level: string;
  partial: boolean;
  table: { a: number; b: number; c: number; d: number; n: number };
  kappa: string;
  po: string;
  pe: string;
  se: string;
  ci: string;
  disagreements: Disagreement[];
}

export interface AgreementNotice {
  state: "insufficient-overlap" | "degenerate" | "unavailable";
  message: string;
}

export type AgreementView = AgreementStats | AgreementNotice;

function fixed3(x: number): string {
  return x.toFixed(3);
}

export function reportView(report: AgreementReport): AgreementStats {
  return {
    state: "report",
    level: report.level,
    partial: report.partial,
    table: report.table,
    kappa: fixed3(report.kappa),
    po: fixed3(report.po),
    pe: fixed3(report.pe),
    se: fixed3(report.se),
    ci: `${fixed3(report.ci_low)} to ${fixed3(report.ci_high)}`,
    disagreements: report.disagreements,
  };
}

export function errorView(error: unknown): AgreementNotice {
  if (error instanceof ApiError) {
    if (error.code === "insufficient_overlap") {
      return { state: "insufficient-overlap", message: "insufficient overlap" };
    }
    if (error.code === "degenerate_table") {
      return { state: "degenerate", message: error.message };
    }
    return { state: "unavailable", message: `${error.code}: ${error.message}` };
  }
  return { state: "unavailable", message: "service unreachable" };
}

/** One call for the poll loop: report in, view out; error in, notice out. */
export function agreementView(outcome: AgreementReport | unknown): AgreementView {
  if (
    outcome !== null &&
    typeof outcome === "object" &&
    "kappa" in (outcome as Record<string, unknown>) &&
    typeof (outcome as AgreementReport).kappa === "number"
  ) {
    return reportView(outcome as AgreementReport);
  }
  return errorView(outcome);
}

// Money rendering from wire integers. Integer arithmetic only.

/** 50 cents -> "0.50" */
export function centsToText(cents: number): string {
  const sign = cents < 0 ? "-" : "";
  const abs = Math.abs(cents);
  const euros = Math.floor(abs / 100);
  const rest = abs % 100;
  return `${sign}${euros}.${String(rest).padStart(2, "0")}`;
}

/** 1600 milli-euros -> "1.60"; sub-cent milli round half-up. */
export function milliToText(milli: number): string {
  const sign = milli < 0 ? "-" : "";
  const abs = Math.abs(milli);
  let cents = Math.floor(abs / 10);
  if (abs % 10 >= 5) cents += 1;
  return sign + centsToText(cents);
}

export function centsToEuroLabel(cents: number): string {
  return `${centsToText(cents)} €`;
}

/** Span arithmetic for trigram highlighting.
 *
 * The server reports which trigrams drove a score; the client only
 * locates those exact strings in the normalized text (never re-scores).
 * Overlapping windows are merged so adjacent trigrams render as one
 * continuous highlight.
 */

export interface Span {
  start: number;
  end: number; // exclusive
}

export function findSpans(text: string, needles: string[]): Span[] {
  const raw: Span[] = [];
  for (const needle of needles) {
    if (!needle) continue;
    let from = 0;
    for (;;) {
      const at = text.indexOf(needle, from);
      if (at === -1) break;
      raw.push({ start: at, end: at + needle.length });
      from = at + 1;
    }
  }
  raw.sort((a, b) => a.start - b.start || a.end - b.end);
  const merged: Span[] = [];
  for (const span of raw) {
    const last = merged[merged.length - 1];
    if (last && span.start <= last.end) {
      last.end = Math.max(last.end, span.end);
    } else {
      merged.push({ ...span });
    }
  }
  return merged;
}

export interface Segment {
  text: string;
  highlighted: boolean;
}

export function segmentText(text: string, needles: string[]): Segment[] {
  const spans = findSpans(text, needles);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      segments.push({ text: text.slice(cursor, span.start), highlighted: false });
    }
    segments.push({ text: text.slice(span.start, span.end), highlighted: true });
    cursor = span.end;
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), highlighted: false });
  }
  return segments;
}

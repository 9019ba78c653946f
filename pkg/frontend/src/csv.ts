// Quote-aware CSV row splitter for the compile preview. Display only: the
// parsed cells are rendered verbatim, never interpreted.

export function parseCsv(text: string, maxRows?: number): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let cell = "";
  let quoted = false;
  let sawAny = false;

  const pushCell = () => {
    row.push(cell);
    cell = "";
  };
  const pushRow = () => {
    pushCell();
    rows.push(row);
    row = [];
    sawAny = false;
  };

  for (let i = 0; i < text.length; i++) {
    const ch = text[i];
    if (quoted) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          cell += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
      continue;
    }
    if (ch === '"' && cell === "") {
      quoted = true;
      sawAny = true;
    } else if (ch === ",") {
      pushCell();
      sawAny = true;
    } else if (ch === "\n" || ch === "\r") {
      if (ch === "\r" && text[i + 1] === "\n") {
        i++;
      }
      if (sawAny || cell !== "" || row.length > 0) {
        pushRow();
      }
      if (maxRows !== undefined && rows.length >= maxRows) {
        return rows;
      }
    } else {
      cell += ch;
      sawAny = true;
    }
  }
  if (sawAny || cell !== "" || row.length > 0) {
    pushRow();
  }
  return rows;
}

// Minimal ZIP reader, enough to open the archives the service returns so
// the solved spec and allocation manifest can be shown without another
// round trip. Handles stored and deflate entries only.

const EOCD_SIG = 0x06054b50;
const CENTRAL_SIG = 0x02014b50;
const LOCAL_SIG = 0x04034b50;

function findEocd(view: DataView): number {
  // EOCD is at the very end unless the archive has a comment; scan back.
  const floor = Math.max(0, view.byteLength - 22 - 65535);
  for (let pos = view.byteLength - 22; pos >= floor; pos--) {
    if (view.getUint32(pos, true) === EOCD_SIG) {
      return pos;
    }
  }
  throw new Error("not a ZIP archive: end-of-central-directory not found");
}

async function inflateRaw(data: Uint8Array): Promise<Uint8Array> {
  const stream = new Blob([data as BlobPart])
    .stream()
    .pipeThrough(new DecompressionStream("deflate-raw"));
  return new Uint8Array(await new Response(stream).arrayBuffer());
}

export async function unzip(
  buffer: ArrayBuffer,
): Promise<Map<string, Uint8Array>> {
  const view = new DataView(buffer);
  const bytes = new Uint8Array(buffer);
  const eocd = findEocd(view);
  const count = view.getUint16(eocd + 10, true);
  let pos = view.getUint32(eocd + 16, true);

  const out = new Map<string, Uint8Array>();
  const decoder = new TextDecoder();
  for (let i = 0; i < count; i++) {
    if (view.getUint32(pos, true) !== CENTRAL_SIG) {
      throw new Error("corrupt ZIP: bad central directory entry");
    }
    const method = view.getUint16(pos + 10, true);
    const compressedSize = view.getUint32(pos + 20, true);
    const nameLength = view.getUint16(pos + 28, true);
    const extraLength = view.getUint16(pos + 30, true);
    const commentLength = view.getUint16(pos + 32, true);
    const localOffset = view.getUint32(pos + 42, true);
    const name = decoder.decode(
      bytes.subarray(pos + 46, pos + 46 + nameLength),
    );

    if (view.getUint32(localOffset, true) !== LOCAL_SIG) {
      throw new Error(`corrupt ZIP: bad local header for ${name}`);
    }
    const localName = view.getUint16(localOffset + 26, true);
    const localExtra = view.getUint16(localOffset + 28, true);
    const dataStart = localOffset + 30 + localName + localExtra;
    const raw = bytes.subarray(dataStart, dataStart + compressedSize);

    if (method === 0) {
      out.set(name, raw.slice());
    } else if (method === 8) {
      out.set(name, await inflateRaw(raw));
    } else {
      throw new Error(`unsupported ZIP compression method ${method}`);
    }
    pos += 46 + nameLength + extraLength + commentLength;
  }
  return out;
}

export function entryText(
  entries: Map<string, Uint8Array>,
  name: string,
): string {
  const data = entries.get(name);
  if (data === undefined) {
    throw new Error(`archive has no entry ${name}`);
  }
  return new TextDecoder().decode(data);
}

export function entryJson<T>(
  entries: Map<string, Uint8Array>,
  name: string,
): T {
  return JSON.parse(entryText(entries, name)) as T;
}

from .exceptions import AddressOutOfRange, TableIncomplete


def translate(proc, logical_addr, segtabs, pagetabs):
    """Logical address of ``proc`` -> physical address, through its segment
    table and then the page table of the segment."""
    if not 0 <= logical_addr < proc.payload_size:
        raise AddressOutOfRange(f'{proc.name}: address {logical_addr} outside 0..{proc.payload_size - 1}')

    st = segtabs.get(proc.name)
    if st is None:
        raise TableIncomplete(f'no segment table for {proc.name}')
    for row in st.rows:
        if logical_addr in row.proc_span:
            vm_addr = row.vm_span.u_min + row.proc_span.offset_of(logical_addr)
            seg = row.seg_index
            break
    else:
        raise TableIncomplete(f'{proc.name}: no segment covers address {logical_addr}')

    pt = pagetabs.get((proc.name, seg))
    if pt is None:
        raise TableIncomplete(f'no page table for segment {seg} of {proc.name}')
    for row in pt.rows:
        if vm_addr in row.vm_span:
            return row.frame.u_min + row.vm_span.offset_of(vm_addr)
    raise TableIncomplete(f'{proc.name}: virtual address {vm_addr} is not paged')
